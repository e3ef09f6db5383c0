//! The worst-case derivative `d_w` and its normalized form `d_r`.
//!
//! For an optimal basis `B` with primal `x*(B)` and dual `y*(B)`,
//!
//! ```text
//! d_w(B) = |y*(B)|ᵀ ΔA x*(B) + |y*(B)|ᵀ Δb + x*(B)ᵀ Δc
//! ```
//!
//! When the optimum is unique and nondegenerate `d_w = d_w(B)`. Otherwise
//! `d_w` is one of the `d_w(B)` over the optimal bases, so their maximum is
//! an upper bound, and when all of them coincide it is the value.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::to_standard;
use crate::interval::{solve_min, ExtValue, SignVector};
use crate::linalg::Matrix;
use crate::lp::{
    enumerate_optimal_bases, solve, Basis, BasisEntry, Form, LpProblem, Optimum, Sense,
    DEFAULT_BASIS_CAP,
};
use crate::oracle::{estimate_dw, SweepConfig};
use crate::pattern::{Coefficient, PerturbationPattern};
use crate::scalar::{dot, max_abs, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grade {
    Exact,
    UpperBound,
    /// Maximum over an incomplete set of optimal bases.
    BasisEstimate,
    OracleApprox,
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Grade::Exact => "exact",
            Grade::UpperBound => "upper-bound",
            Grade::BasisEstimate => "basis-estimate",
            Grade::OracleApprox => "oracle-approx",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Auto,
    Nondeg,
    Basis,
    Tractable,
    Oracle,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Auto => "auto",
            Method::Nondeg => "nondeg",
            Method::Basis => "basis",
            Method::Tractable => "tractable",
            Method::Oracle => "oracle",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasisValue<S> {
    pub basis: Basis,
    pub d_w: S,
    pub d_r: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleSummary {
    pub estimate: f64,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct SensitivityReport<S> {
    /// `f(A, b, c)` in the problem's own sense.
    pub objective: S,
    pub d_w: S,
    pub d_r: f64,
    pub grade: Grade,
    pub method: Method,
    /// Bases are column sets of the standardized problem.
    pub per_basis: Vec<BasisValue<S>>,
    pub truncated: bool,
    /// `‖(ΔA, Δb, Δc)‖_F` of the pattern as given.
    pub pattern_norm: f64,
    /// `sgn(y*(B))` for the basis attaining `d_w`.
    pub worst_sign: Option<SignVector>,
    /// Optimal basis returned by the solver.
    pub basis: Basis,
    /// Primal solution in the original variables.
    pub x: Vec<S>,
    /// Dual solution of the minimization form.
    pub y: Vec<S>,
    pub oracle: Option<OracleSummary>,
    pub notes: Vec<String>,
}

/// `|y|ᵀ ΔA x + |y|ᵀ Δb + xᵀ Δc`.
pub fn dw_formula<S: Scalar>(x: &[S], y: &[S], pattern: &PerturbationPattern<S>) -> S {
    let abs_y: Vec<S> = y.iter().map(|v| v.abs()).collect();
    dot(&abs_y, &pattern.da().mul_vec(x)) + dot(&abs_y, pattern.db()) + dot(x, pattern.dc())
}

/// `d_w` at a unique nondegenerate optimum.
pub fn dw_nondegenerate<S: Scalar>(opt: &Optimum<S>, pattern: &PerturbationPattern<S>) -> Result<S> {
    if !opt.is_unique_nondegenerate() {
        return Err(Error::DegenerateInput);
    }
    Ok(dw_formula(&opt.x, &opt.y, pattern))
}

pub fn dw_of_basis<S: Scalar>(entry: &BasisEntry<S>, pattern: &PerturbationPattern<S>) -> S {
    dw_formula(&entry.x, &entry.y, pattern)
}

/// Degenerate fallback: `max_B d_w(B)` over the enumerated optimal bases.
///
/// `problem` must be in standard form; `seed` is its optimum.
pub fn dw_upper_bound<S: Scalar>(
    problem: &LpProblem<S>,
    seed: &Optimum<S>,
    pattern: &PerturbationPattern<S>,
    cap: usize,
) -> Result<BasisBound<S>> {
    pattern.check_dims(problem)?;
    let bases = enumerate_optimal_bases(&problem.to_min(), seed, cap)?;
    let values: Vec<S> = bases
        .entries
        .par_iter()
        .map(|e| dw_of_basis(e, pattern))
        .collect();
    let mut best = 0;
    for k in 1..values.len() {
        if values[k] > values[best] {
            best = k;
        }
    }
    let lo = values.iter().cloned().reduce(|a, b| if b < a { b } else { a });
    let hi = values[best].clone();
    let all_equal = lo.is_some_and(|lo| {
        if S::EXACT {
            lo == hi
        } else {
            (hi.as_f64() - lo.as_f64()).abs() <= 1e-9 * (1.0 + hi.as_f64().abs())
        }
    });
    let grade = if bases.truncated {
        Grade::BasisEstimate
    } else if all_equal {
        Grade::Exact
    } else {
        Grade::UpperBound
    };
    Ok(BasisBound {
        value: hi,
        grade,
        argmax: best,
        truncated: bases.truncated,
        entries: bases.entries.into_iter().zip(values).collect(),
    })
}

/// Output of [`dw_upper_bound`].
#[derive(Clone, Debug)]
pub struct BasisBound<S> {
    pub value: S,
    /// `Exact` when the enumeration is complete and every basis gives the
    /// same value.
    pub grade: Grade,
    pub argmax: usize,
    pub truncated: bool,
    pub entries: Vec<(BasisEntry<S>, S)>,
}

/// `max h(x)` over the optimal face, where the face is written through
/// complementary slackness with `y*`: columns with a positive reduced cost
/// are fixed at zero. With a unique dual this equals `max_B d_w(B)`.
///
/// Fails with [`Error::Unbounded`] when the optimal face is unbounded in a
/// direction that increases `h`.
pub fn dw_tractable_unique_dual<S: Scalar>(
    problem: &LpProblem<S>,
    y_star: &[S],
    pattern: &PerturbationPattern<S>,
) -> Result<S> {
    problem.require_form(Form::Standard)?;
    pattern.check_dims(problem)?;
    if y_star.len() != problem.m() {
        return Err(Error::DimensionMismatch("dual vector length".into()));
    }
    let c = problem.min_objective();
    let aty = problem.a().tr_mul_vec(y_star);
    let scale = max_abs(&c);
    let face: Vec<usize> = (0..problem.n())
        .filter(|&j| (c[j].clone() - aty[j].clone()).is_degenerate_zero(&scale))
        .collect();
    let abs_y: Vec<S> = y_star.iter().map(|v| v.abs()).collect();
    let weights = pattern.da().tr_mul_vec(&abs_y);
    let h: Vec<S> = face
        .iter()
        .map(|&j| -(weights[j].clone() + pattern.dc()[j].clone()))
        .collect();
    let restricted = LpProblem::standard(problem.a().select_columns(&face), problem.b().to_vec(), h)?;
    match solve_min(&restricted)?.0 {
        ExtValue::Finite(v) => Ok(dot(&abs_y, pattern.db()) - v),
        ExtValue::NegInf => Err(Error::Unbounded),
        ExtValue::PosInf => Err(Error::Infeasible),
    }
}

/// `max xᵀΔc` over the optimal face when `ΔA = 0` and `Δb = 0`.
///
/// For `Δc = c >= 0` the worst case is `(1 + α) f`, so `d_w = f` directly.
pub fn dw_objective_only<S: Scalar>(
    problem: &LpProblem<S>,
    opt: &Optimum<S>,
    pattern: &PerturbationPattern<S>,
) -> Result<S> {
    pattern.check_dims(problem)?;
    if !pattern.is_objective_only() {
        return Err(Error::PatternNotObjectiveOnly);
    }
    let c = problem.min_objective();
    if c.iter().all(|v| *v >= S::zero()) && c.as_slice() == pattern.dc() {
        return Ok(opt.min_objective(Sense::Min));
    }
    dw_tractable_unique_dual(problem, &opt.y, pattern)
}

/// `d_w / ‖(ΔA, Δb, Δc)‖_F`.
pub fn d_r_normalize<S: Scalar>(d_w: &S, pattern: &PerturbationPattern<S>) -> Result<f64> {
    if pattern.is_zero() {
        return Err(Error::ZeroPattern);
    }
    Ok(d_w.as_f64() / pattern.frobenius_norm())
}

/// `d_w` for a unit radius on one coefficient: `x*_j`, `|y*_i|` or `|y*_i x*_j|`.
pub fn single_coefficient<S: Scalar>(opt: &Optimum<S>, which: Coefficient) -> Result<S> {
    if !opt.is_unique_nondegenerate() {
        return Err(Error::DegenerateInput);
    }
    let get = |v: &[S], k: usize| {
        v.get(k)
            .cloned()
            .ok_or_else(|| Error::DimensionMismatch(format!("{which:?} out of range")))
    };
    match which {
        Coefficient::Obj(j) => get(&opt.x, j),
        Coefficient::Rhs(i) => Ok(get(&opt.y, i)?.abs()),
        Coefficient::MatEntry(i, j) => Ok((get(&opt.y, i)? * get(&opt.x, j)?).abs()),
    }
}

#[derive(Clone, Debug)]
pub struct AnalyzeOptions {
    pub method: Method,
    pub cap: usize,
    /// Attach an oracle cross-check to non-exact results (and drive
    /// [`Method::Oracle`]).
    pub oracle: Option<SweepConfig>,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            method: Method::Auto,
            cap: DEFAULT_BASIS_CAP,
            oracle: None,
        }
    }
}

/// Full pipeline: standardize, solve, pick a method, assemble the report.
pub fn analyze<S: Scalar>(
    problem: &LpProblem<S>,
    pattern: &PerturbationPattern<S>,
    options: &AnalyzeOptions,
) -> Result<SensitivityReport<S>> {
    pattern.check_dims(problem)?;
    if pattern.is_zero() {
        return Err(Error::ZeroPattern);
    }
    let norm = pattern.frobenius_norm();
    let t = to_standard(problem, pattern)?;
    let std = t.problem.to_min();
    let opt = solve(&std)?.into_optimum()?;
    let objective = match problem.sense() {
        Sense::Min => opt.objective.clone(),
        Sense::Max => -opt.objective.clone(),
    };
    let mut report = SensitivityReport {
        objective,
        d_w: S::zero(),
        d_r: 0.0,
        grade: Grade::Exact,
        method: options.method,
        per_basis: Vec::new(),
        truncated: false,
        pattern_norm: norm,
        worst_sign: None,
        basis: opt.basis.clone(),
        x: t.back_map.original_x(&opt.x),
        y: opt.y.clone(),
        oracle: None,
        notes: Vec::new(),
    };
    let single = |opt: &Optimum<S>, d_w: S| BasisValue {
        basis: opt.basis.clone(),
        d_r: d_w.as_f64() / norm,
        d_w,
    };

    match options.method {
        Method::Nondeg => {
            let d = dw_nondegenerate(&opt, &t.pattern)?;
            report.per_basis.push(single(&opt, d.clone()));
            report.d_w = d;
            report.worst_sign = Some(SignVector::of(&opt.y));
        }
        Method::Auto if opt.is_unique_nondegenerate() => {
            let d = dw_nondegenerate(&opt, &t.pattern)?;
            report.per_basis.push(single(&opt, d.clone()));
            report.d_w = d;
            report.worst_sign = Some(SignVector::of(&opt.y));
        }
        Method::Auto | Method::Basis => {
            let bound = dw_upper_bound(&std, &opt, &t.pattern, options.cap)?;
            apply_bound(&mut report, &bound, norm);
            if bound.truncated && options.method == Method::Auto {
                let unique_dual = !opt.dual_degenerate;
                if t.pattern.is_objective_only() || unique_dual {
                    match tractable(&std, &opt, &t.pattern) {
                        Ok((d, grade)) => {
                            report.d_w = d;
                            report.grade = grade;
                            report.method = Method::Tractable;
                        }
                        Err(e) => report.notes.push(format!("tractable bound failed: {e}")),
                    }
                }
            }
        }
        Method::Tractable => {
            if opt.dual_degenerate && !t.pattern.is_objective_only() {
                report
                    .notes
                    .push("dual optimum not certified unique; value is max over the face of y*".into());
            }
            let (d, grade) = tractable(&std, &opt, &t.pattern)?;
            report.d_w = d;
            report.grade = grade;
            report.worst_sign = Some(SignVector::of(&opt.y));
        }
        Method::Oracle => {
            let cfg = options.oracle.clone().unwrap_or_default();
            let est = estimate_dw(problem, pattern, &cfg)?;
            report.d_w = est.estimate.clone();
            report.grade = Grade::OracleApprox;
            report.worst_sign = est.signs.last().cloned();
            report.oracle = Some(OracleSummary {
                estimate: est.estimate.as_f64(),
                residual: est.residual.as_f64(),
            });
        }
    }
    report.d_r = report.d_w.as_f64() / norm;

    if let (Some(cfg), true) = (&options.oracle, report.oracle.is_none()) {
        if report.grade != Grade::Exact {
            if problem.m() > cfg.max_m {
                report.notes.push(format!("oracle skipped: m = {} exceeds {}", problem.m(), cfg.max_m));
            } else {
                match estimate_dw(problem, pattern, cfg) {
                    Ok(est) => {
                        report.oracle = Some(OracleSummary {
                            estimate: est.estimate.as_f64(),
                            residual: est.residual.as_f64(),
                        })
                    }
                    Err(e) => report.notes.push(format!("oracle failed: {e}")),
                }
            }
        }
    }
    Ok(report)
}

fn apply_bound<S: Scalar>(report: &mut SensitivityReport<S>, bound: &BasisBound<S>, norm: f64) {
    report.d_w = bound.value.clone();
    report.grade = bound.grade;
    report.truncated = bound.truncated;
    report.worst_sign = Some(SignVector::of(&bound.entries[bound.argmax].0.y));
    report.per_basis = bound
        .entries
        .iter()
        .map(|(e, v)| BasisValue {
            basis: e.basis.clone(),
            d_w: v.clone(),
            d_r: v.as_f64() / norm,
        })
        .collect();
}

fn tractable<S: Scalar>(
    std: &LpProblem<S>,
    opt: &Optimum<S>,
    pattern: &PerturbationPattern<S>,
) -> Result<(S, Grade)> {
    if pattern.is_objective_only() {
        let c = std.min_objective();
        let exact = c.iter().all(|v| *v >= S::zero()) && c.as_slice() == pattern.dc();
        let d = dw_objective_only(std, opt, pattern)?;
        return Ok((d, if exact { Grade::Exact } else { Grade::UpperBound }));
    }
    let d = dw_tractable_unique_dual(std, &opt.y, pattern)?;
    let grade = if opt.is_unique_nondegenerate() {
        Grade::Exact
    } else {
        Grade::UpperBound
    };
    Ok((d, grade))
}

/// The absolute-pattern closed form `(|y|ᵀe + 1)(xᵀe + 1) - 1`.
pub fn dw_absolute_closed_form<S: Scalar>(x: &[S], y: &[S]) -> S {
    let sy = y.iter().fold(S::zero(), |a, v| a + v.abs());
    let sx = x.iter().fold(S::zero(), |a, v| a + v.clone());
    (sy + S::one()) * (sx + S::one()) - S::one()
}

/// Builds the literal optimal-face LP `max h(x)` s.t. `Ax = b, cᵀx = bᵀy*, x >= 0`
/// as a standard-form minimization of `-h`; used to cross-check
/// [`dw_tractable_unique_dual`].
pub fn optimal_face_lp<S: Scalar>(
    problem: &LpProblem<S>,
    y_star: &[S],
    pattern: &PerturbationPattern<S>,
) -> Result<(LpProblem<S>, S)> {
    problem.require_form(Form::Standard)?;
    let c = problem.min_objective();
    let abs_y: Vec<S> = y_star.iter().map(|v| v.abs()).collect();
    let weights = pattern.da().tr_mul_vec(&abs_y);
    let h: Vec<S> = (0..problem.n())
        .map(|j| -(weights[j].clone() + pattern.dc()[j].clone()))
        .collect();
    let a = problem.a().vstack(&Matrix::from_fn(1, problem.n(), |_, j| c[j].clone()));
    let mut b = problem.b().to_vec();
    b.push(dot(problem.b(), y_star));
    Ok((LpProblem::standard(a, b, h)?, dot(&abs_y, pattern.db())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use num_traits::Signed;

    fn q(s: &str) -> Rational {
        Rational::parse_literal(s).unwrap()
    }

    fn example1(c3: &str) -> LpProblem<Rational> {
        let a = Matrix::from_rows(vec![
            vec![q("5"), q("-7"), q("1")],
            vec![q("7"), q("-10"), q("1")],
        ])
        .unwrap();
        LpProblem::standard(a, vec![q("1"), q("0")], vec![q("12"), q("-17"), q(c3)]).unwrap()
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1.0)
    }

    #[test]
    fn nondegenerate_example_one() {
        let p = example1("1.5");
        let r = analyze(&p, &PerturbationPattern::relative(&p), &AnalyzeOptions::default()).unwrap();
        assert_eq!(r.grade, Grade::Exact);
        assert!(close(r.d_w.as_f64(), 29.556, 1e-3), "{}", r.d_w);
        assert!(close(r.d_r, 1.1494, 1e-3), "{}", r.d_r);
        assert_eq!(r.objective, q("-2/3"));
    }

    #[test]
    fn c3_two_and_a_half() {
        let p = example1("2.5");
        let r = analyze(&p, &PerturbationPattern::relative(&p), &AnalyzeOptions::default()).unwrap();
        assert_eq!(r.d_w, q("479"));
        assert!((r.d_r - 18.571).abs() < 0.02);
        assert!((r.pattern_norm * r.pattern_norm - 665.25).abs() < 1e-9);
    }

    #[test]
    fn degenerate_bases_and_bound() {
        let p = example1("2");
        let r = analyze(&p, &PerturbationPattern::relative(&p), &AnalyzeOptions::default()).unwrap();
        assert_eq!(r.grade, Grade::UpperBound);
        assert_eq!(r.d_w, q("479"));
        let vals: Vec<Rational> = r.per_basis.iter().map(|b| b.d_w.clone()).collect();
        assert_eq!(vals, vec![q("479"), q("77/3")]);
        assert_eq!(r.worst_sign, Some(SignVector::all_plus(2)));
    }

    #[test]
    fn tractable_matches_enumeration_and_face_lp() {
        let p = example1("2");
        let pat = PerturbationPattern::relative(&p);
        let opt = solve(&p).unwrap().into_optimum().unwrap();
        assert_eq!(opt.y, vec![q("1"), q("1")]);
        let d = dw_tractable_unique_dual(&p, &opt.y, &pat).unwrap();
        assert_eq!(d, q("479"));
        let (face, constant) = optimal_face_lp(&p, &opt.y, &pat).unwrap();
        let v = solve_min(&face).unwrap().0;
        assert_eq!(constant - v.finite().unwrap().clone(), q("479"));
    }

    #[test]
    fn objective_only_patterns() {
        let p = example1("2");
        let opt = solve(&p).unwrap().into_optimum().unwrap();
        let pat = PerturbationPattern::single(2, 3, Coefficient::Obj(2)).unwrap();
        assert_eq!(dw_objective_only(&p, &opt, &pat).unwrap(), q("10/3"));
        let rel = PerturbationPattern::relative(&p);
        assert!(matches!(
            dw_objective_only(&p, &opt, &rel),
            Err(Error::PatternNotObjectiveOnly)
        ));
        // c >= 0 and Δc = c: d_w = f
        let pos = LpProblem::standard(Matrix::from_rows(vec![vec![q("1"), q("1")]]).unwrap(), vec![q("7")], vec![q("1"), q("2")])
            .unwrap();
        let o = solve(&pos).unwrap().into_optimum().unwrap();
        let pc = PerturbationPattern::custom(Matrix::zeros(1, 2), vec![q("0")], vec![q("1"), q("2")]).unwrap();
        assert_eq!(dw_objective_only(&pos, &o, &pc).unwrap(), q("7"));
    }

    #[test]
    fn single_coefficients() {
        let p = example1("1.5");
        let opt = solve(&p).unwrap().into_optimum().unwrap();
        assert_eq!(single_coefficient(&opt, Coefficient::Obj(1)).unwrap(), q("1/3"));
        assert_eq!(single_coefficient(&opt, Coefficient::Rhs(0)).unwrap(), opt.y[0].abs());
        let pat = PerturbationPattern::single(2, 3, Coefficient::MatEntry(1, 2)).unwrap();
        assert_eq!(
            single_coefficient(&opt, Coefficient::MatEntry(1, 2)).unwrap(),
            dw_nondegenerate(&opt, &pat).unwrap()
        );
        let deg = solve(&example1("2")).unwrap().into_optimum().unwrap();
        assert!(matches!(
            single_coefficient(&deg, Coefficient::Obj(0)),
            Err(Error::DegenerateInput)
        ));
    }

    #[test]
    fn absolute_closed_form_agrees() {
        let p = example1("1.5");
        let opt = solve(&p).unwrap().into_optimum().unwrap();
        let pat = PerturbationPattern::absolute(&p);
        assert_eq!(dw_nondegenerate(&opt, &pat).unwrap(), dw_absolute_closed_form(&opt.x, &opt.y));
    }

    #[test]
    fn zero_pattern() {
        let p = example1("1.5");
        let opt = solve(&p).unwrap().into_optimum().unwrap();
        let z = PerturbationPattern::zero(2, 3);
        assert_eq!(dw_nondegenerate(&opt, &z).unwrap(), q("0"));
        assert!(matches!(d_r_normalize(&q("0"), &z), Err(Error::ZeroPattern)));
    }

    #[test]
    fn oracle_attached_to_bounds() {
        let p = example1("2");
        let opts = AnalyzeOptions {
            oracle: Some(SweepConfig::default()),
            ..Default::default()
        };
        let r = analyze(&p, &PerturbationPattern::relative(&p), &opts).unwrap();
        let o = r.oracle.unwrap();
        assert!((o.estimate - 77.0 / 3.0).abs() < 1e-3);
        assert!((o.estimate / r.pattern_norm - 0.99681).abs() < 1e-3);
    }

    #[test]
    fn hypercube_is_exact() {
        for n in [2usize, 5] {
            let a = Matrix::from_fn(2 * n, n, |i, j| {
                if i == j {
                    q("1")
                } else if i == j + n {
                    q("-1")
                } else {
                    q("0")
                }
            });
            let p = LpProblem::new(a, vec![q("1"); 2 * n], vec![q("1"); n], Form::IneqFree, Sense::Max)
                .unwrap();
            let r = analyze(&p, &PerturbationPattern::relative(&p), &AnalyzeOptions::default()).unwrap();
            assert_eq!(r.grade, Grade::Exact);
            assert_eq!(r.d_w, Rational::from_int(3 * n as i64));
            assert!((r.d_r - 0.6 * ((5 * n) as f64).sqrt()).abs() < 1e-9);
            assert_eq!(r.objective, Rational::from_int(n as i64));
            let r = analyze(&p, &PerturbationPattern::absolute(&p), &AnalyzeOptions::default()).unwrap();
            assert_eq!(r.d_w, Rational::from_int((n * (n + 2)) as i64));
        }
    }
}
