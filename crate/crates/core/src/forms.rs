//! Conversions between the three LP forms, carrying the perturbation
//! pattern along so that slack columns stay fixed and split variables share
//! the radii of the column they came from.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::lp::{Form, LpProblem, Sense};
use crate::pattern::PerturbationPattern;
use crate::scalar::Scalar;

pub use crate::pattern::{Coefficient, PatternKind};

/// How the columns of a standardized problem relate to the original variables.
///
/// Layout is `[x | x² | slack]` where the `x²` block is present only for
/// free variables (`x = x¹ - x²`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackMap {
    pub source: Form,
    pub n_original: usize,
    pub split: bool,
    pub slack_start: usize,
    pub n_slack: usize,
}

impl BackMap {
    fn identity(n: usize) -> Self {
        BackMap {
            source: Form::Standard,
            n_original: n,
            split: false,
            slack_start: n,
            n_slack: 0,
        }
    }

    /// Original variables from a solution of the standardized problem.
    pub fn original_x<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let n = self.n_original;
        if self.split {
            (0..n).map(|j| x[j].clone() - x[n + j].clone()).collect()
        } else {
            x[..n].to_vec()
        }
    }
}

/// A standard-form problem with its induced pattern.
#[derive(Clone, Debug)]
pub struct TransformedProblem<S> {
    pub problem: LpProblem<S>,
    pub pattern: PerturbationPattern<S>,
    pub back_map: BackMap,
}

/// Standard form of `problem`, without a pattern.
pub fn standardize<S: Scalar>(problem: &LpProblem<S>) -> (LpProblem<S>, BackMap) {
    let zero = PerturbationPattern::zero(problem.m(), problem.n());
    let t = to_standard(problem, &zero).expect("zero pattern always matches");
    (t.problem, t.back_map)
}

/// Rewrites `problem` as `Ax = b, x >= 0`.
///
/// * `Ax <= b, x >= 0` becomes `(A | I)`, pattern `(ΔA | 0)`.
/// * `Ax <= b` becomes `(A | -A | I)` with objective `(c, -c)`, pattern
///   `(ΔA | ΔA | 0)` and `(Δc, Δc, 0)`.
///
/// Standard-form input passes through. The sense is preserved.
pub fn to_standard<S: Scalar>(
    problem: &LpProblem<S>,
    pattern: &PerturbationPattern<S>,
) -> Result<TransformedProblem<S>> {
    pattern.check_dims(problem)?;
    let (m, n) = (problem.m(), problem.n());
    let (a, c, da, dc, split) = match problem.form() {
        Form::Standard => {
            return Ok(TransformedProblem {
                problem: problem.clone(),
                pattern: pattern.clone(),
                back_map: BackMap::identity(n),
            })
        }
        Form::IneqNonneg => (
            problem.a().clone(),
            problem.c().to_vec(),
            pattern.da().clone(),
            pattern.dc().to_vec(),
            false,
        ),
        Form::IneqFree => {
            let neg = problem.a().map(|v| -v.clone());
            let mut c = problem.c().to_vec();
            c.extend(problem.c().iter().map(|v| -v.clone()));
            let mut dc = pattern.dc().to_vec();
            dc.extend(pattern.dc().iter().cloned());
            (
                problem.a().hstack(&neg),
                c,
                pattern.da().hstack(pattern.da()),
                dc,
                true,
            )
        }
    };
    let width = a.cols();
    let a = a.hstack(&Matrix::identity(m));
    let da = da.hstack(&Matrix::zeros(m, m));
    let mut c = c;
    c.extend(std::iter::repeat_n(S::zero(), m));
    let mut dc = dc;
    dc.extend(std::iter::repeat_n(S::zero(), m));
    let std_problem = LpProblem::new(a, problem.b().to_vec(), c, Form::Standard, problem.sense())?;
    Ok(TransformedProblem {
        problem: std_problem,
        pattern: PerturbationPattern::from_parts(da, pattern.db().to_vec(), dc, pattern.kind()),
        back_map: BackMap {
            source: problem.form(),
            n_original: n,
            split,
            slack_start: width,
            n_slack: m,
        },
    })
}

/// The one realization of an inequality-form interval LP that attains the
/// worst-case optimal value at inflation `alpha`, as a minimization in
/// `Ax <= b, x >= 0` form.
///
/// For `Ax <= b, x >= 0` this is `(A + αΔA, b - αΔb, c + αΔc)`. For free
/// variables the sign of each variable matters, so the realization is
/// returned in split form: `(A + αΔA) x¹ - (A - αΔA) x² <= b - αΔb` with
/// objective `(c + αΔc)ᵀx¹ - (c - αΔc)ᵀx²`.
///
/// `c` here is the minimization objective, so maximization problems are
/// negated first.
pub fn worst_case_realization_ineq<S: Scalar>(
    problem: &LpProblem<S>,
    pattern: &PerturbationPattern<S>,
    alpha: &S,
) -> Result<LpProblem<S>> {
    pattern.check_dims(problem)?;
    if *alpha < S::zero() {
        return Err(Error::InvalidPattern("alpha must be nonnegative".into()));
    }
    let c = problem.min_objective();
    let shift = |v: &S, r: &S, sign: i8| -> S {
        if sign > 0 {
            v.clone() + alpha.clone() * r.clone()
        } else {
            v.clone() - alpha.clone() * r.clone()
        }
    };
    let (m, n) = (problem.m(), problem.n());
    let a_up = Matrix::from_fn(m, n, |i, j| shift(&problem.a()[(i, j)], &pattern.da()[(i, j)], 1));
    let b_low: Vec<S> = (0..m).map(|i| shift(&problem.b()[i], &pattern.db()[i], -1)).collect();
    let c_up: Vec<S> = (0..n).map(|j| shift(&c[j], &pattern.dc()[j], 1)).collect();
    match problem.form() {
        Form::Standard => Err(Error::WrongForm {
            expected: "ineq_nonneg or ineq_free".into(),
            found: Form::Standard.to_string(),
        }),
        Form::IneqNonneg => LpProblem::new(a_up, b_low, c_up, Form::IneqNonneg, Sense::Min),
        Form::IneqFree => {
            let a_neg_low = Matrix::from_fn(m, n, |i, j| {
                -shift(&problem.a()[(i, j)], &pattern.da()[(i, j)], -1)
            });
            let mut obj = c_up;
            obj.extend((0..n).map(|j| -shift(&c[j], &pattern.dc()[j], -1)));
            LpProblem::new(a_up.hstack(&a_neg_low), b_low, obj, Form::IneqNonneg, Sense::Min)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::optimal_value;
    use crate::scalar::Rational;

    fn q(s: &str) -> Rational {
        Rational::parse_literal(s).unwrap()
    }

    /// `max eᵀx s.t. -e <= x <= e` as `Ax <= b` with `A = (I; -I)`.
    fn hypercube<S: Scalar>(n: usize) -> LpProblem<S> {
        let a = Matrix::from_fn(2 * n, n, |i, j| {
            if i == j {
                S::one()
            } else if i == j + n {
                -S::one()
            } else {
                S::zero()
            }
        });
        LpProblem::new(a, vec![S::one(); 2 * n], vec![S::one(); n], Form::IneqFree, Sense::Max)
            .unwrap()
    }

    #[test]
    fn hypercube_standardizes_to_eight_columns() {
        let p = hypercube::<f64>(2);
        let t = to_standard(&p, &PerturbationPattern::relative(&p)).unwrap();
        assert_eq!(t.problem.m(), 4);
        assert_eq!(t.problem.n(), 8);
        assert!(t.back_map.split);
        // split block duplicates the pattern, slack block is fixed
        for i in 0..4 {
            for j in 0..2 {
                assert_eq!(t.pattern.da()[(i, j)], t.pattern.da()[(i, j + 2)]);
            }
            for j in 4..8 {
                assert_eq!(t.pattern.da()[(i, j)], 0.0);
            }
        }
        assert_eq!(t.pattern.dc(), &[1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(t.problem.c()[2], -1.0);
    }

    #[test]
    fn ineq_nonneg_gets_slacks() {
        let p = LpProblem::new(
            Matrix::from_rows(vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap(),
            vec![1.0, 2.0],
            vec![1.0, 1.0, 1.0],
            Form::IneqNonneg,
            Sense::Min,
        )
        .unwrap();
        let t = to_standard(&p, &PerturbationPattern::relative(&p)).unwrap();
        assert_eq!(t.problem.n(), 5);
        assert_eq!(t.back_map.slack_start, 3);
        assert_eq!(t.pattern.da().column(3), vec![0.0, 0.0]);
        assert_eq!(t.pattern.dc()[4], 0.0);
        assert_eq!(t.back_map.original_x(&[1.0, 2.0, 3.0, 4.0, 5.0]), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn standard_passes_through() {
        let p = LpProblem::standard(Matrix::<f64>::identity(2), vec![1.0, 1.0], vec![1.0, 1.0])
            .unwrap();
        let t = to_standard(&p, &PerturbationPattern::relative(&p)).unwrap();
        assert_eq!(t.problem, p);
        assert!(matches!(
            worst_case_realization_ineq(&p, &t.pattern, &1.0),
            Err(Error::WrongForm { .. })
        ));
    }

    #[test]
    fn hypercube_relative_realization_value() {
        let p = hypercube::<Rational>(2);
        let r = worst_case_realization_ineq(&p, &PerturbationPattern::relative(&p), &q("1/2"))
            .unwrap();
        assert_eq!(optimal_value(&r).unwrap().finite().cloned(), Some(q("-1/3")));
    }

    #[test]
    fn hypercube_absolute_realization_value() {
        // symmetric solution t = (1-α)/(1+αn), value -n(1-α)²/(1+αn)
        let p = hypercube::<Rational>(3);
        let r = worst_case_realization_ineq(&p, &PerturbationPattern::absolute(&p), &q("0.1"))
            .unwrap();
        let expect = q("-3") * q("0.81") / q("1.3");
        assert_eq!(optimal_value(&r).unwrap().finite().cloned(), Some(expect));
    }

    #[test]
    fn zero_inflation_keeps_problem_value() {
        let p = hypercube::<Rational>(2);
        let r = worst_case_realization_ineq(&p, &PerturbationPattern::relative(&p), &q("0"))
            .unwrap();
        assert_eq!(optimal_value(&r).unwrap().finite().cloned(), Some(q("-2")));
    }
}
