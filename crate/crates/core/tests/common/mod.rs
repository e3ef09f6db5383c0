//! Instance generators and brute-force checks shared by the integration tests.
#![allow(dead_code)]

use lpsens::linalg::{Lu, Matrix};
use lpsens::lp::{Basis, Form, LpProblem, Sense};
use lpsens::pattern::PerturbationPattern;
use lpsens::scalar::{Rational, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn q(s: &str) -> Rational {
    Rational::parse_literal(s).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn example1<S: Scalar>(c3: &str) -> LpProblem<S> {
    let a = Matrix::from_rows(vec![
        vec![S::from_int(5), S::from_int(-7), S::from_int(1)],
        vec![S::from_int(7), S::from_int(-10), S::from_int(1)],
    ])
    .unwrap();
    let c = vec![S::from_int(12), S::from_int(-17), S::parse_literal(c3).unwrap()];
    LpProblem::standard(a, vec![S::from_int(1), S::from_int(0)], c).unwrap()
}

/// `max eᵀx  s.t.  -e <= x <= e`.
pub fn hypercube<S: Scalar>(n: usize) -> LpProblem<S> {
    let a = Matrix::from_fn(2 * n, n, |i, j| {
        if i == j {
            S::one()
        } else if i == j + n {
            -S::one()
        } else {
            S::zero()
        }
    });
    LpProblem::new(a, vec![S::one(); 2 * n], vec![S::one(); n], Form::IneqFree, Sense::Max).unwrap()
}

fn int_matrix<S: Scalar>(r: &mut ChaCha8Rng, m: usize, n: usize, lo: i64, hi: i64) -> Matrix<S> {
    Matrix::from_fn(m, n, |_, _| S::from_int(r.random_range(lo..=hi)))
}

fn int_vec<S: Scalar>(r: &mut ChaCha8Rng, len: usize, lo: i64, hi: i64) -> Vec<S> {
    (0..len).map(|_| S::from_int(r.random_range(lo..=hi))).collect()
}

/// Standard-form instance with integer data in `[-k, k]`; `b = A x0` for a
/// random nonnegative integer `x0`, so it is always feasible.
pub fn random_standard<S: Scalar>(r: &mut ChaCha8Rng, max_m: usize, max_n: usize, k: i64) -> LpProblem<S> {
    let m = r.random_range(1..=max_m);
    let n = r.random_range(m + 1..=max_n);
    let a = int_matrix::<S>(r, m, n, -k, k);
    let x0: Vec<S> = int_vec(r, n, 0, 2);
    let b = a.mul_vec(&x0);
    let c = int_vec(r, n, -k, k);
    LpProblem::standard(a, b, c).unwrap()
}

/// Nonnegative integer pattern with entries in `[0, k]`.
pub fn random_pattern<S: Scalar>(r: &mut ChaCha8Rng, m: usize, n: usize, k: i64) -> PerturbationPattern<S> {
    PerturbationPattern::custom(int_matrix(r, m, n, 0, k), int_vec(r, m, 0, k), int_vec(r, n, 0, k)).unwrap()
}

/// Inequality-form instance (`IneqFree` or `IneqNonneg`).
pub fn random_inequality<S: Scalar>(r: &mut ChaCha8Rng, max_m: usize, max_n: usize) -> LpProblem<S> {
    let m = r.random_range(1..=max_m);
    let n = r.random_range(1..=max_n);
    let form = if r.random_bool(0.5) { Form::IneqFree } else { Form::IneqNonneg };
    let a = int_matrix::<S>(r, m, n, -3, 3);
    let b = int_vec(r, m, -3, 3);
    let c = int_vec(r, n, -3, 3);
    LpProblem::new(a, b, c, form, Sense::Min).unwrap()
}

/// Every `m`-subset of `0..n` in lexicographic order.
pub fn subsets(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            cur.push(j);
            go(j + 1, n, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, m, &mut Vec::new(), &mut out);
    out
}

/// Optimal bases by testing every index set: `A_B` nonsingular,
/// `A_B⁻¹b >= 0`, `c - Aᵀ A_B⁻ᵀ c_B >= 0`. Exact arithmetic only.
pub fn brute_force_optimal_bases(p: &LpProblem<Rational>) -> Vec<Basis> {
    let zero = Rational::from_int(0);
    subsets(p.n(), p.m())
        .into_iter()
        .filter(|cols| {
            let Ok(lu) = Lu::factor(&p.a().select_columns(cols)) else {
                return false;
            };
            if lu.solve(p.b()).iter().any(|v| *v < zero) {
                return false;
            }
            let cb: Vec<Rational> = cols.iter().map(|&j| p.c()[j].clone()).collect();
            let y = lu.solve_transpose(&cb);
            let aty = p.a().tr_mul_vec(&y);
            (0..p.n()).all(|j| p.c()[j].clone() - aty[j].clone() >= zero)
        })
        .map(|cols| Basis::new(cols, p.n()).unwrap())
        .collect()
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + b.abs())
}
