//! Per-basis primal/dual solutions and breadth-first enumeration of the
//! optimal bases of a (possibly degenerate) standard-form LP.

use std::collections::{BTreeSet, HashSet, VecDeque};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{Lu, Matrix};
use crate::lp::{Basis, Form, LpProblem, Optimum};
use crate::scalar::{max_abs, Scalar};

/// A basis with its basic solution `x*(B)` (full length `n`) and dual `y*(B)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisEntry<S> {
    pub basis: Basis,
    pub x: Vec<S>,
    pub y: Vec<S>,
}

/// Output of [`enumerate_optimal_bases`], sorted by index set.
#[derive(Clone, Debug)]
pub struct OptimalBases<S> {
    pub entries: Vec<BasisEntry<S>>,
    /// `true` when the cap stopped the search before the frontier was empty.
    pub truncated: bool,
}

/// `y = A_B⁻ᵀ c_B` for the minimization form of `problem`.
pub fn dual_solution<S: Scalar>(problem: &LpProblem<S>, basis: &Basis) -> Result<Vec<S>> {
    let c = problem.min_objective();
    let lu = factor_basis(problem.a(), basis)?;
    let cb: Vec<S> = basis.indices().iter().map(|&j| c[j].clone()).collect();
    Ok(lu.solve_transpose(&cb))
}

/// Primal and dual basic solutions of `basis` by direct linear solves.
pub fn basic_solution<S: Scalar>(problem: &LpProblem<S>, basis: &Basis) -> Result<BasisEntry<S>> {
    let c = problem.min_objective();
    let lu = factor_basis(problem.a(), basis)?;
    let xb = lu.solve(problem.b());
    let cb: Vec<S> = basis.indices().iter().map(|&j| c[j].clone()).collect();
    let y = lu.solve_transpose(&cb);
    let mut x = vec![S::zero(); problem.n()];
    for (k, &j) in basis.indices().iter().enumerate() {
        x[j] = xb[k].clone();
    }
    Ok(BasisEntry {
        basis: basis.clone(),
        x,
        y,
    })
}

fn factor_basis<S: Scalar>(a: &Matrix<S>, basis: &Basis) -> Result<Lu<S>> {
    if basis.len() != a.rows() {
        return Err(Error::SingularBasis);
    }
    Lu::factor(&a.select_columns(basis.indices())).map_err(|_| Error::SingularBasis)
}

/// Optimality test `A_B⁻¹b >= 0` and `c_N - A_Nᵀy >= 0`, returning the solution when it passes.
pub(crate) fn verify_optimal<S: Scalar>(
    problem: &LpProblem<S>,
    basis: &Basis,
) -> Option<BasisEntry<S>> {
    let entry = basic_solution(problem, basis).ok()?;
    let c = problem.min_objective();
    let primal_ok = basis
        .indices()
        .iter()
        .all(|&j| entry.x[j] >= S::zero() || entry.x[j].is_negligible());
    if !primal_ok {
        return None;
    }
    let aty = problem.a().tr_mul_vec(&entry.y);
    let dual_ok = basis
        .complement(problem.n())
        .iter()
        .all(|&j| {
            let rc = c[j].clone() - aty[j].clone();
            rc >= S::zero() || rc.is_negligible()
        });
    dual_ok.then_some(entry)
}

/// Breadth-first search over optimal bases adjacent by a single pivot.
///
/// From each basis two kinds of neighbours are generated: a nonbasic column
/// with zero reduced cost entering through the (tied) minimum-ratio rows,
/// and degenerate pivots on rows whose basic variable is zero. Every
/// candidate is re-verified by direct solves before it is accepted.
pub fn enumerate_optimal_bases<S: Scalar>(
    problem: &LpProblem<S>,
    seed: &Optimum<S>,
    cap: usize,
) -> Result<OptimalBases<S>> {
    problem.require_form(Form::Standard)?;
    let seed_entry = verify_optimal(problem, &seed.basis).ok_or(Error::SingularBasis)?;
    let mut seen: HashSet<Basis> = HashSet::new();
    let mut found: Vec<BasisEntry<S>> = Vec::new();
    let mut queue: VecDeque<BasisEntry<S>> = VecDeque::new();
    seen.insert(seed_entry.basis.clone());
    queue.push_back(seed_entry);
    let mut truncated = false;

    while let Some(entry) = queue.pop_front() {
        if found.len() >= cap {
            truncated = true;
            break;
        }
        let candidates = neighbours(problem, &entry)?;
        found.push(entry);
        let fresh: Vec<Basis> = candidates
            .into_iter()
            .filter(|b| seen.insert(b.clone()))
            .collect();
        let verified: Vec<Option<BasisEntry<S>>> = fresh
            .par_iter()
            .map(|b| verify_optimal(problem, b))
            .collect();
        queue.extend(verified.into_iter().flatten());
    }
    found.sort_by(|a, b| a.basis.cmp(&b.basis));
    Ok(OptimalBases {
        entries: found,
        truncated,
    })
}

fn neighbours<S: Scalar>(problem: &LpProblem<S>, entry: &BasisEntry<S>) -> Result<BTreeSet<Basis>> {
    let a = problem.a();
    let n = problem.n();
    let c = problem.min_objective();
    let basis = &entry.basis;
    let binv = factor_basis(a, basis)?.inverse();
    let nonbasic = basis.complement(n);
    let aty = a.tr_mul_vec(&entry.y);
    let rc: Vec<S> = c.iter().zip(&aty).map(|(cj, v)| cj.clone() - v.clone()).collect();
    let xb: Vec<S> = basis.indices().iter().map(|&j| entry.x[j].clone()).collect();
    let x_scale = max_abs(&xb);
    let c_scale = max_abs(&c);

    let mut tableau_cache: Vec<Option<Vec<S>>> = vec![None; n];
    let mut column = |j: usize| -> Vec<S> {
        tableau_cache[j]
            .get_or_insert_with(|| binv.mul_vec(&a.column(j)))
            .clone()
    };

    let mut out = BTreeSet::new();
    // Alternative optima: zero reduced cost entering columns.
    for &j in &nonbasic {
        if !rc[j].is_degenerate_zero(&c_scale) {
            continue;
        }
        let d = column(j);
        for row in min_ratio_rows(&xb, &d) {
            out.insert(basis.exchange(basis.indices()[row], j));
        }
    }
    // Degenerate pivots on zero-valued basic variables.
    let zero_rows: Vec<usize> = (0..xb.len())
        .filter(|&i| xb[i].is_degenerate_zero(&x_scale))
        .collect();
    if !zero_rows.is_empty() {
        for &j in &nonbasic {
            let d = column(j);
            for &row in &zero_rows {
                if d[row].is_negligible() {
                    continue;
                }
                if stays_dual_feasible(&rc, &nonbasic, j, row, &d[row], &mut column) {
                    out.insert(basis.exchange(basis.indices()[row], j));
                }
            }
        }
    }
    Ok(out)
}

/// Rows attaining the minimum ratio `x_B[i] / d[i]` over `d[i] > 0`.
fn min_ratio_rows<S: Scalar>(xb: &[S], d: &[S]) -> Vec<usize> {
    let ratios: Vec<(usize, S)> = d
        .iter()
        .enumerate()
        .filter(|(_, di)| **di > S::zero() && !di.is_negligible())
        .map(|(i, di)| {
            let xi = if xb[i] < S::zero() { S::zero() } else { xb[i].clone() };
            (i, xi / di.clone())
        })
        .collect();
    let Some(min) = ratios
        .iter()
        .map(|(_, r)| r.clone())
        .reduce(|a, b| if b < a { b } else { a })
    else {
        return Vec::new();
    };
    let tol = if S::EXACT {
        0.0
    } else {
        1e-9 * (1.0 + min.abs().as_f64())
    };
    ratios
        .into_iter()
        .filter(|(_, r)| (r.clone() - min.clone()).as_f64() <= tol)
        .map(|(i, _)| i)
        .collect()
}

/// Reduced costs after pivoting `entering` into `row` stay nonnegative.
fn stays_dual_feasible<S: Scalar>(
    rc: &[S],
    nonbasic: &[usize],
    entering: usize,
    row: usize,
    pivot: &S,
    column: &mut impl FnMut(usize) -> Vec<S>,
) -> bool {
    let rc_in = rc[entering].clone();
    if rc_in.is_negligible() {
        return true;
    }
    // Leaving variable's new reduced cost is -rc_in / pivot.
    let leaving_rc = -(rc_in.clone() / pivot.clone());
    if leaving_rc < S::zero() && !leaving_rc.is_negligible() {
        return false;
    }
    let ratio = rc_in / pivot.clone();
    nonbasic.iter().filter(|&&k| k != entering).all(|&k| {
        let tk = column(k)[row].clone();
        let v = rc[k].clone() - ratio.clone() * tk;
        v >= S::zero() || v.is_negligible()
    })
}
