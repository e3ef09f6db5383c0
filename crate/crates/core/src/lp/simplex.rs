//! Two-phase revised simplex with Bland's rule and an explicit basis inverse.

use crate::error::{Error, Result};
use crate::linalg::{independent_rows, Lu, Matrix};
use crate::lp::{Basis, Form, LpProblem, LpSolution, Optimum};
use crate::scalar::{max_abs, Scalar};

/// Basis condition estimates above this abort the float backend.
const CONDITION_LIMIT: f64 = 1e13;
/// Pivots between refactorizations on the float backend.
const REFACTOR_EVERY: usize = 50;

/// Solves `min cᵀx s.t. Ax = b, x >= 0` (or the maximization).
///
/// Pivoting follows Bland's rule with lowest-index tie-breaking, so the
/// result is deterministic.
pub fn solve<S: Scalar>(problem: &LpProblem<S>) -> Result<LpSolution<S>> {
    problem.require_form(Form::Standard)?;
    let (m, n) = (problem.m(), problem.n());
    let rank = independent_rows(problem.a()).len();
    if rank < m {
        return Err(Error::RankDeficient { rank, rows: m });
    }
    let c = problem.min_objective();

    let mut tab = Revised::phase_one(problem.a(), problem.b());
    match tab.run(&Pricing::PhaseOne { n })? {
        Outcome::Optimal => {}
        // The auxiliary objective is bounded below by zero.
        Outcome::Unbounded => unreachable!("phase one cannot be unbounded"),
    }
    let infeasibility = tab
        .basis
        .iter()
        .zip(&tab.xb)
        .filter(|(&j, _)| j >= n)
        .fold(S::zero(), |acc, (_, v)| acc + v.abs());
    let b_scale = max_abs(problem.b());
    if S::EXACT {
        if !infeasibility.is_zero() {
            return Ok(LpSolution::Infeasible);
        }
    } else if infeasibility.as_f64() > 1e-9 * (1.0 + b_scale.as_f64()) {
        return Ok(LpSolution::Infeasible);
    }
    tab.drive_out_artificials(n)?;

    let pricing = Pricing::PhaseTwo { c: &c };
    for _ in 0..4 {
        if let Outcome::Unbounded = tab.run(&pricing)? {
            return Ok(LpSolution::Unbounded);
        }
        tab.refactor()?;
        if tab.is_dual_feasible(&pricing) {
            break;
        }
    }
    let basis = Basis::new(tab.basis.clone(), n).map_err(|_| Error::SingularBasis)?;
    finish(problem, &c, basis).map(LpSolution::Optimal)
}

/// Recomputes the solution from a fresh factorization of `A_B`.
fn finish<S: Scalar>(problem: &LpProblem<S>, c: &[S], basis: Basis) -> Result<Optimum<S>> {
    let a = problem.a();
    let ab = a.select_columns(basis.indices());
    let lu = Lu::factor(&ab).map_err(|_| Error::SingularBasis)?;
    if !S::EXACT && !basis.is_empty() {
        let estimate = ab.norm1() * lu.inverse().norm1();
        if !(estimate <= CONDITION_LIMIT) {
            return Err(Error::NumericBreakdown { estimate });
        }
    }
    let mut xb = lu.solve(problem.b());
    if !S::EXACT {
        for v in &mut xb {
            if *v < S::zero() && v.is_negligible() {
                *v = S::zero();
            }
        }
    }
    let cb: Vec<S> = basis.indices().iter().map(|&j| c[j].clone()).collect();
    let y = lu.solve_transpose(&cb);
    let aty = a.tr_mul_vec(&y);
    let reduced_costs: Vec<S> = c.iter().zip(&aty).map(|(cj, v)| cj.clone() - v.clone()).collect();

    let mut x = vec![S::zero(); problem.n()];
    for (k, &j) in basis.indices().iter().enumerate() {
        x[j] = xb[k].clone();
    }
    let min_obj = crate::scalar::dot(c, &x);
    let objective = match problem.sense() {
        crate::lp::Sense::Min => min_obj,
        crate::lp::Sense::Max => -min_obj,
    };
    let x_scale = max_abs(&xb);
    let c_scale = max_abs(c);
    let primal_degenerate = xb.iter().any(|v| v.is_degenerate_zero(&x_scale));
    let dual_degenerate = basis
        .complement(problem.n())
        .iter()
        .any(|&j| reduced_costs[j].is_degenerate_zero(&c_scale));
    Ok(Optimum {
        x,
        y,
        basis,
        objective,
        reduced_costs,
        primal_degenerate,
        dual_degenerate,
    })
}

enum Outcome {
    Optimal,
    Unbounded,
}

enum Pricing<'a, S> {
    /// Minimize the sum of artificials (columns `n..n+m`).
    PhaseOne { n: usize },
    /// Minimize `cᵀx` over the structural columns only.
    PhaseTwo { c: &'a [S] },
}

impl<S: Scalar> Pricing<'_, S> {
    fn cost(&self, j: usize) -> S {
        match self {
            Pricing::PhaseOne { n } => {
                if j >= *n {
                    S::one()
                } else {
                    S::zero()
                }
            }
            Pricing::PhaseTwo { c } => c[j].clone(),
        }
    }

    fn columns(&self, total: usize) -> usize {
        match self {
            Pricing::PhaseOne { .. } => total,
            Pricing::PhaseTwo { c } => c.len(),
        }
    }
}

/// Working state: `[A | I]` with rows sign-normalized so that `b >= 0`.
struct Revised<S> {
    a: Matrix<S>,
    b: Vec<S>,
    n: usize,
    basis: Vec<usize>,
    binv: Matrix<S>,
    xb: Vec<S>,
    pivots_since_refactor: usize,
}

impl<S: Scalar> Revised<S> {
    fn phase_one(a: &Matrix<S>, b: &[S]) -> Self {
        let (m, n) = (a.rows(), a.cols());
        let mut a = a.clone();
        let mut b = b.to_vec();
        for i in 0..m {
            if b[i] < S::zero() {
                b[i] = -b[i].clone();
                for v in a.row_mut(i) {
                    *v = -v.clone();
                }
            }
        }
        Revised {
            xb: b.clone(),
            a,
            b,
            n,
            basis: (n..n + m).collect(),
            binv: Matrix::identity(m),
            pivots_since_refactor: 0,
        }
    }

    fn m(&self) -> usize {
        self.b.len()
    }

    fn column(&self, j: usize) -> Vec<S> {
        if j < self.n {
            self.a.column(j)
        } else {
            let mut e = vec![S::zero(); self.m()];
            e[j - self.n] = S::one();
            e
        }
    }

    /// `B⁻¹ a_j`.
    fn ftran(&self, j: usize) -> Vec<S> {
        let m = self.m();
        if j >= self.n {
            return self.binv.column(j - self.n);
        }
        let col = self.a.column(j);
        (0..m)
            .map(|i| crate::scalar::dot(self.binv.row(i), &col))
            .collect()
    }

    fn duals(&self, pricing: &Pricing<S>) -> Vec<S> {
        let cb: Vec<S> = self.basis.iter().map(|&j| pricing.cost(j)).collect();
        self.binv.tr_mul_vec(&cb)
    }

    fn reduced_cost(&self, pricing: &Pricing<S>, y: &[S], j: usize) -> S {
        let col_dot = if j < self.n {
            (0..self.m()).fold(S::zero(), |acc, i| {
                if y[i].is_zero() {
                    acc
                } else {
                    acc + y[i].clone() * self.a[(i, j)].clone()
                }
            })
        } else {
            y[j - self.n].clone()
        };
        pricing.cost(j) - col_dot
    }

    fn is_dual_feasible(&self, pricing: &Pricing<S>) -> bool {
        let y = self.duals(pricing);
        (0..pricing.columns(self.n + self.m()))
            .filter(|j| !self.basis.contains(j))
            .all(|j| {
                let rc = self.reduced_cost(pricing, &y, j);
                !(rc < S::zero() && !rc.is_negligible())
            })
    }

    fn run(&mut self, pricing: &Pricing<S>) -> Result<Outcome> {
        let total = pricing.columns(self.n + self.m());
        let limit = 50_000 + 200 * (self.m() + self.n);
        for _ in 0..limit {
            let y = self.duals(pricing);
            let mut in_basis = vec![false; self.n + self.m()];
            for &j in &self.basis {
                in_basis[j] = true;
            }
            // Bland: lowest-index improving column.
            let entering = (0..total).find(|&j| {
                if in_basis[j] {
                    return false;
                }
                let rc = self.reduced_cost(pricing, &y, j);
                rc < S::zero() && !rc.is_negligible()
            });
            let Some(entering) = entering else {
                return Ok(Outcome::Optimal);
            };
            let d = self.ftran(entering);
            let Some(row) = self.ratio_test(&d) else {
                return Ok(Outcome::Unbounded);
            };
            self.pivot(row, entering, &d)?;
        }
        Err(Error::NumericBreakdown {
            estimate: f64::INFINITY,
        })
    }

    /// Minimum-ratio row; ties go to the lowest basic variable index.
    fn ratio_test(&self, d: &[S]) -> Option<usize> {
        let ratios: Vec<(usize, S)> = d
            .iter()
            .enumerate()
            .filter(|(_, di)| **di > S::zero() && !di.is_negligible())
            .map(|(i, di)| {
                let xi = if self.xb[i] < S::zero() {
                    S::zero()
                } else {
                    self.xb[i].clone()
                };
                (i, xi / di.clone())
            })
            .collect();
        let min = ratios
            .iter()
            .map(|(_, r)| r)
            .fold(None::<&S>, |acc, r| match acc {
                Some(a) if a <= r => Some(a),
                _ => Some(r),
            })?
            .clone();
        let tie_tol = if S::EXACT {
            0.0
        } else {
            1e-12 * (1.0 + min.abs().as_f64())
        };
        ratios
            .iter()
            .filter(|(_, r)| (r.clone() - min.clone()).as_f64() <= tie_tol)
            .min_by_key(|(i, _)| self.basis[*i])
            .map(|(i, _)| *i)
    }

    fn pivot(&mut self, row: usize, entering: usize, d: &[S]) -> Result<()> {
        let m = self.m();
        let piv = d[row].clone();
        {
            let r = self.binv.row_mut(row);
            for v in r.iter_mut() {
                *v = v.clone() / piv.clone();
            }
        }
        self.xb[row] = self.xb[row].clone() / piv.clone();
        let pivot_row = self.binv.row(row).to_vec();
        let x_row = self.xb[row].clone();
        for i in 0..m {
            if i == row || d[i].is_zero() {
                continue;
            }
            let f = d[i].clone();
            for (v, p) in self.binv.row_mut(i).iter_mut().zip(&pivot_row) {
                *v = v.clone() - f.clone() * p.clone();
            }
            self.xb[i] = self.xb[i].clone() - f * x_row.clone();
        }
        self.basis[row] = entering;
        self.pivots_since_refactor += 1;
        if !S::EXACT && self.pivots_since_refactor >= REFACTOR_EVERY {
            self.refactor()?;
        }
        Ok(())
    }

    fn refactor(&mut self) -> Result<()> {
        self.pivots_since_refactor = 0;
        if S::EXACT {
            return Ok(());
        }
        let m = self.m();
        let ab = Matrix::from_fn(m, m, |i, k| {
            let j = self.basis[k];
            if j < self.n {
                self.a[(i, j)].clone()
            } else if j - self.n == i {
                S::one()
            } else {
                S::zero()
            }
        });
        let lu = Lu::factor(&ab).map_err(|_| Error::SingularBasis)?;
        self.binv = lu.inverse();
        self.xb = lu.solve(&self.b);
        Ok(())
    }

    /// Pivots basic artificials at level zero out of the basis.
    fn drive_out_artificials(&mut self, n: usize) -> Result<()> {
        for row in 0..self.m() {
            if self.basis[row] < n {
                continue;
            }
            let r = self.binv.row(row).to_vec();
            let mut best: Option<(usize, S)> = None;
            for j in (0..n).filter(|j| !self.basis.contains(j)) {
                let col = self.column(j);
                let v = crate::scalar::dot(&r, &col);
                if v.is_negligible() {
                    continue;
                }
                let mag = v.abs();
                let better = match &best {
                    None => true,
                    Some((_, b)) => !S::EXACT && mag > *b,
                };
                if better {
                    best = Some((j, mag));
                    if S::EXACT {
                        break;
                    }
                }
            }
            let Some((j, _)) = best else {
                return Err(Error::RankDeficient {
                    rank: self.m() - 1,
                    rows: self.m(),
                });
            };
            let d = self.ftran(j);
            self.pivot(row, j, &d)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{Sense, Status};
    use crate::scalar::Rational;

    fn example1<S: Scalar>(c3: &str) -> LpProblem<S> {
        let a = Matrix::from_rows(vec![
            vec![S::from_int(5), S::from_int(-7), S::from_int(1)],
            vec![S::from_int(7), S::from_int(-10), S::from_int(1)],
        ])
        .unwrap();
        let c = vec![
            S::from_int(12),
            S::from_int(-17),
            S::parse_literal(c3).unwrap(),
        ];
        LpProblem::standard(a, vec![S::from_int(1), S::from_int(0)], c).unwrap()
    }

    fn q(s: &str) -> Rational {
        Rational::parse_literal(s).unwrap()
    }

    #[test]
    fn example_one_nondegenerate_basis() {
        let sol = solve(&example1::<Rational>("1.5")).unwrap().into_optimum().unwrap();
        assert_eq!(sol.basis.indices(), &[1, 2]);
        assert_eq!(sol.x, vec![q("0"), q("1/3"), q("10/3")]);
        // -17/3 + 1.5 * 10/3
        assert_eq!(sol.objective, q("-2/3"));
        assert!(!sol.primal_degenerate);
        assert!(!sol.dual_degenerate);
    }

    #[test]
    fn example_one_float_matches() {
        let sol = solve(&example1::<f64>("1.5")).unwrap().into_optimum().unwrap();
        assert!((sol.objective + 2.0 / 3.0).abs() < 1e-12);
        assert!((sol.x[2] - 10.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn example_one_c3_two_is_dual_degenerate() {
        let sol = solve(&example1::<Rational>("2")).unwrap().into_optimum().unwrap();
        assert!(sol.dual_degenerate);
        assert_eq!(sol.y, vec![q("1"), q("1")]);
        assert_eq!(sol.objective, q("1"));
    }

    #[test]
    fn single_variable() {
        let p = LpProblem::standard(Matrix::from_rows(vec![vec![1.0]]).unwrap(), vec![1.0], vec![1.0])
            .unwrap();
        let sol = solve(&p).unwrap().into_optimum().unwrap();
        assert_eq!(sol.x, vec![1.0]);
        assert_eq!(sol.y, vec![1.0]);
        assert_eq!(sol.objective, 1.0);
        assert!(sol.is_unique_nondegenerate());
    }

    #[test]
    fn infeasible_and_unbounded() {
        // x1 + x2 = -1 with x >= 0
        let p = LpProblem::standard(
            Matrix::from_rows(vec![vec![1.0, 1.0]]).unwrap(),
            vec![-1.0],
            vec![1.0, 1.0],
        )
        .unwrap();
        assert_eq!(solve(&p).unwrap().status(), Status::Infeasible);
        // x1 - x2 = 0, minimize -x1
        let p = LpProblem::standard(
            Matrix::from_rows(vec![vec![1.0, -1.0]]).unwrap(),
            vec![0.0],
            vec![-1.0, 0.0],
        )
        .unwrap();
        assert_eq!(solve(&p).unwrap().status(), Status::Unbounded);
    }

    #[test]
    fn rank_deficiency_is_an_error() {
        let p = LpProblem::standard(
            Matrix::from_rows(vec![vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap(),
            vec![1.0, 2.0],
            vec![1.0, 1.0],
        )
        .unwrap();
        assert!(matches!(solve(&p), Err(Error::RankDeficient { rank: 1, rows: 2 })));
    }

    #[test]
    fn wrong_form_rejected() {
        let p = LpProblem::new(
            Matrix::from_rows(vec![vec![1.0]]).unwrap(),
            vec![1.0],
            vec![1.0],
            Form::IneqNonneg,
            Sense::Min,
        )
        .unwrap();
        assert!(matches!(solve(&p), Err(Error::WrongForm { .. })));
    }

    #[test]
    fn maximization_reports_own_sense() {
        // max x1 + 2 x2 s.t. x1 + x2 + s = 4
        let p = LpProblem::new(
            Matrix::from_rows(vec![vec![1.0, 1.0, 1.0]]).unwrap(),
            vec![4.0],
            vec![1.0, 2.0, 0.0],
            Form::Standard,
            Sense::Max,
        )
        .unwrap();
        let sol = solve(&p).unwrap().into_optimum().unwrap();
        assert_eq!(sol.objective, 8.0);
        assert_eq!(sol.y, vec![-2.0]);
    }

    #[test]
    fn ill_conditioned_float_basis_breaks_down() {
        let eps = 1e-15;
        let p = LpProblem::standard(
            Matrix::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0 + eps * 8.0]]).unwrap(),
            vec![1.0, 1.0],
            vec![1.0, 1.0],
        );
        // Either rank detection or the condition check must refuse this.
        let res = solve(&p.unwrap());
        assert!(matches!(
            res,
            Err(Error::NumericBreakdown { .. }) | Err(Error::RankDeficient { .. })
        ));
    }
}
