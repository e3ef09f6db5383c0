//! Optimal-value range of an inflated interval LP: the best case from one
//! relaxed LP, the worst case by enumerating all `2^m` sign vectors.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::standardize;
use crate::linalg::Matrix;
use crate::lp::{solve, Basis, Form, LpProblem, LpSolution, Optimum, Sense};
use crate::pattern::PerturbationPattern;
use crate::scalar::Scalar;

/// Default limit on `m` for sign enumeration.
pub const DEFAULT_MAX_M: usize = 20;

/// An optimal value on the extended real line. Infeasible minimization
/// problems have value `+∞`, unbounded ones `-∞`.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub enum ExtValue<S> {
    NegInf,
    Finite(S),
    PosInf,
}

impl<S> ExtValue<S> {
    pub fn finite(&self) -> Option<&S> {
        match self {
            ExtValue::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtValue::Finite(_))
    }
}

impl<S: Scalar> ExtValue<S> {
    pub fn as_f64(&self) -> f64 {
        match self {
            ExtValue::NegInf => f64::NEG_INFINITY,
            ExtValue::Finite(v) => v.as_f64(),
            ExtValue::PosInf => f64::INFINITY,
        }
    }
}

impl<S: fmt::Display> fmt::Display for ExtValue<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtValue::NegInf => f.write_str("-inf"),
            ExtValue::Finite(v) => v.fmt(f),
            ExtValue::PosInf => f.write_str("+inf"),
        }
    }
}

/// Solves `problem` in any form and returns the optimal value of its
/// minimization form together with the optimum of the standardized problem.
pub fn solve_min<S: Scalar>(problem: &LpProblem<S>) -> Result<(ExtValue<S>, Option<Optimum<S>>)> {
    let (std, _) = standardize(&problem.to_min());
    let std = match std.without_dependent_rows() {
        Ok(p) => p,
        Err(Error::Infeasible) => return Ok((ExtValue::PosInf, None)),
        Err(e) => return Err(e),
    };
    Ok(match solve(&std)? {
        LpSolution::Optimal(o) => (ExtValue::Finite(o.objective.clone()), Some(o)),
        LpSolution::Infeasible => (ExtValue::PosInf, None),
        LpSolution::Unbounded => (ExtValue::NegInf, None),
    })
}

/// Optimal value of the minimization form of `problem`.
pub fn optimal_value<S: Scalar>(problem: &LpProblem<S>) -> Result<ExtValue<S>> {
    solve_min(problem).map(|(v, _)| v)
}

/// A vector in `{±1}^m`.
///
/// Sign vectors are numbered by reading `-1` as a set bit, first entry most
/// significant, so the all-plus vector is number zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SignVector(Vec<i8>);

impl SignVector {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidPattern("sign entries must be +1 or -1".into()));
        }
        Ok(SignVector(signs))
    }

    pub fn all_plus(m: usize) -> Self {
        SignVector(vec![1; m])
    }

    /// Signs of `v` with `sgn(0) = +1`.
    pub fn of<S: Scalar>(v: &[S]) -> Self {
        SignVector(v.iter().map(|x| x.sign()).collect())
    }

    pub fn from_index(index: u64, m: usize) -> Self {
        SignVector(
            (0..m)
                .map(|i| if index >> (m - 1 - i) & 1 == 1 { -1 } else { 1 })
                .collect(),
        )
    }

    pub fn index(&self) -> u64 {
        self.0
            .iter()
            .fold(0, |acc, &s| (acc << 1) | u64::from(s == -1))
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, s) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            f.write_str(if *s > 0 { "+" } else { "-" })?;
        }
        f.write_str(")")
    }
}

/// The family `A ∈ [A - αΔA, A + αΔA]`, `b ∈ [b - αΔb, b + αΔb]`,
/// `c ∈ [c - αΔc, c + αΔc]` around a standard-form minimization problem.
#[derive(Clone, Debug)]
pub struct InflatedIntervalLp<S> {
    base: LpProblem<S>,
    pattern: PerturbationPattern<S>,
    alpha: S,
}

impl<S: Scalar> InflatedIntervalLp<S> {
    /// A maximization base is stored as its minimization form, so all values
    /// are reported for `min`.
    pub fn new(base: &LpProblem<S>, pattern: &PerturbationPattern<S>, alpha: S) -> Result<Self> {
        base.require_form(Form::Standard)?;
        pattern.check_dims(base)?;
        if alpha < S::zero() {
            return Err(Error::InvalidPattern("alpha must be nonnegative".into()));
        }
        Ok(InflatedIntervalLp {
            base: base.to_min(),
            pattern: pattern.clone(),
            alpha,
        })
    }

    pub fn base(&self) -> &LpProblem<S> {
        &self.base
    }

    pub fn pattern(&self) -> &PerturbationPattern<S> {
        &self.pattern
    }

    pub fn alpha(&self) -> &S {
        &self.alpha
    }

    fn radius(&self, r: &S) -> S {
        self.alpha.clone() * r.clone()
    }

    /// `(A - α diag(s) ΔA, b + α diag(s) Δb, c + α Δc)`.
    pub fn realization(&self, s: &SignVector) -> LpProblem<S> {
        let p = &self.base;
        let pat = &self.pattern;
        let signed = |v: &S, r: &S, sign: i8| {
            if sign > 0 {
                v.clone() + self.radius(r)
            } else {
                v.clone() - self.radius(r)
            }
        };
        let a = Matrix::from_fn(p.m(), p.n(), |i, j| {
            signed(&p.a()[(i, j)], &pat.da()[(i, j)], -s.0[i])
        });
        let b = (0..p.m()).map(|i| signed(&p.b()[i], &pat.db()[i], s.0[i])).collect();
        let c = (0..p.n()).map(|j| signed(&p.c()[j], &pat.dc()[j], 1)).collect();
        LpProblem::new(a, b, c, Form::Standard, Sense::Min).expect("dimensions preserved")
    }
}

/// `min c̲ᵀx  s.t.  A̲x <= b̄, -Āx <= -b̲, x >= 0`.
pub fn best_case<S: Scalar>(ilp: &InflatedIntervalLp<S>) -> Result<ExtValue<S>> {
    let p = &ilp.base;
    let pat = &ilp.pattern;
    let (m, n) = (p.m(), p.n());
    let lower = Matrix::from_fn(m, n, |i, j| p.a()[(i, j)].clone() - ilp.radius(&pat.da()[(i, j)]));
    let neg_upper =
        Matrix::from_fn(m, n, |i, j| -(p.a()[(i, j)].clone() + ilp.radius(&pat.da()[(i, j)])));
    let mut rhs: Vec<S> = (0..m).map(|i| p.b()[i].clone() + ilp.radius(&pat.db()[i])).collect();
    rhs.extend((0..m).map(|i| -(p.b()[i].clone() - ilp.radius(&pat.db()[i]))));
    let c = (0..n).map(|j| p.c()[j].clone() - ilp.radius(&pat.dc()[j])).collect();
    let relaxed = LpProblem::new(lower.vstack(&neg_upper), rhs, c, Form::IneqNonneg, Sense::Min)?;
    optimal_value(&relaxed)
}

/// Some realizations were infeasible, which the regularity assumptions of
/// the sensitivity theory exclude for small `α`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityWarning {
    pub infeasible: u64,
    pub total: u64,
}

impl fmt::Display for RegularityWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} of {} sign realizations are infeasible",
            self.infeasible, self.total
        )
    }
}

/// Result of [`worst_case`].
///
/// `value` is the maximum over the feasible realizations. When some
/// realizations are infeasible the true worst case is `+∞`; this is
/// surfaced through `warning` instead, and `value` is `+∞` only when every
/// realization is infeasible.
#[derive(Clone, Debug)]
pub struct WorstCase<S> {
    pub value: ExtValue<S>,
    pub argmax_sign: SignVector,
    /// Optimal basis of the maximizing realization when its value is finite.
    pub argmax_basis: Option<Basis>,
    pub unbounded: u64,
    pub warning: Option<RegularityWarning>,
}

/// Maximum over indexed values; ties go to the smallest index. The result
/// does not depend on evaluation order.
pub fn worst_case_parallel_reduce<S: Scalar>(values: &[ExtValue<S>]) -> Option<(usize, ExtValue<S>)> {
    values
        .par_iter()
        .enumerate()
        .map(|(k, v)| (k, v.clone()))
        .reduce_with(pick_max)
}

fn pick_max<S: Scalar>(a: (usize, ExtValue<S>), b: (usize, ExtValue<S>)) -> (usize, ExtValue<S>) {
    match a.1.partial_cmp(&b.1) {
        Some(Ordering::Greater) => a,
        Some(Ordering::Less) => b,
        _ => {
            if a.0 <= b.0 {
                a
            } else {
                b
            }
        }
    }
}

/// `max_s f(A - α diag(s) ΔA, b + α diag(s) Δb, c + αΔc)` over all `2^m` signs.
pub fn worst_case<S: Scalar>(ilp: &InflatedIntervalLp<S>, max_m: usize) -> Result<WorstCase<S>> {
    let m = ilp.base.m();
    if m > max_m || m >= 63 {
        return Err(Error::TooManyConstraints { m, limit: max_m });
    }
    let total = 1u64 << m;
    let solved: Vec<(ExtValue<S>, Option<Basis>)> = (0..total)
        .into_par_iter()
        .map(|k| {
            let r = ilp.realization(&SignVector::from_index(k, m));
            solve_min(&r).map(|(v, o)| (v, o.map(|o| o.basis)))
        })
        .collect::<Result<_>>()?;
    let values: Vec<ExtValue<S>> = solved.iter().map(|(v, _)| v.clone()).collect();
    let infeasible = values.iter().filter(|v| **v == ExtValue::PosInf).count() as u64;
    let feasible: Vec<ExtValue<S>> = if infeasible < total {
        values
            .iter()
            .map(|v| if *v == ExtValue::PosInf { ExtValue::NegInf } else { v.clone() })
            .collect()
    } else {
        values.clone()
    };
    let (mut k, value) = worst_case_parallel_reduce(&feasible).expect("at least one sign vector");
    if value == ExtValue::NegInf {
        // every feasible realization is unbounded; report the first of those
        k = values.iter().position(|v| *v == ExtValue::NegInf).unwrap_or(k);
    }
    let unbounded = values.iter().filter(|v| **v == ExtValue::NegInf).count() as u64;
    Ok(WorstCase {
        value,
        argmax_sign: SignVector::from_index(k as u64, m),
        argmax_basis: solved[k].1.clone(),
        unbounded,
        warning: (infeasible > 0).then_some(RegularityWarning { infeasible, total }),
    })
}

/// `[f̲, f̄]` for the inflated family.
#[derive(Clone, Debug)]
pub struct OptimalValueRange<S> {
    pub f_low: ExtValue<S>,
    pub f_high: ExtValue<S>,
    pub argmax_sign: SignVector,
    pub argmax_basis: Option<Basis>,
    pub warning: Option<RegularityWarning>,
}

pub fn value_range<S: Scalar>(
    ilp: &InflatedIntervalLp<S>,
    max_m: usize,
) -> Result<OptimalValueRange<S>> {
    let worst = worst_case(ilp, max_m)?;
    Ok(OptimalValueRange {
        f_low: best_case(ilp)?,
        f_high: worst.value,
        argmax_sign: worst.argmax_sign,
        argmax_basis: worst.argmax_basis,
        warning: worst.warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

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

    #[test]
    fn sign_vector_numbering() {
        assert_eq!(SignVector::from_index(0, 3).signs(), &[1, 1, 1]);
        assert_eq!(SignVector::from_index(1, 3).signs(), &[1, 1, -1]);
        assert_eq!(SignVector::from_index(4, 3).signs(), &[-1, 1, 1]);
        for k in 0..8 {
            assert_eq!(SignVector::from_index(k, 3).index(), k);
        }
        assert_eq!(SignVector::of(&[0.0, -2.0]).signs(), &[1, -1]);
        assert_eq!(SignVector::from_index(2, 2).to_string(), "(-,+)");
        assert!(SignVector::new(vec![0]).is_err());
    }

    #[test]
    fn example_one_worst_case() {
        let p = example1("2");
        let ilp = InflatedIntervalLp::new(&p, &PerturbationPattern::relative(&p), q("0.1")).unwrap();
        let w = worst_case(&ilp, DEFAULT_MAX_M).unwrap();
        assert_eq!(w.value, ExtValue::Finite(q("10.43") / q("2.7")));
        assert_eq!(w.argmax_sign, SignVector::all_plus(2));
        // s = (+,-) is infeasible at this α
        assert_eq!(w.warning, Some(RegularityWarning { infeasible: 1, total: 4 }));
    }

    #[test]
    fn zero_alpha_ties() {
        let p = example1("1.5");
        let ilp = InflatedIntervalLp::new(&p, &PerturbationPattern::relative(&p), q("0")).unwrap();
        let r = value_range(&ilp, DEFAULT_MAX_M).unwrap();
        assert_eq!(r.f_high, ExtValue::Finite(q("-2/3")));
        assert_eq!(r.f_low, ExtValue::Finite(q("-2/3")));
        assert_eq!(r.argmax_sign.index(), 0);
    }

    #[test]
    fn best_case_relaxes_equality() {
        let p = LpProblem::standard(Matrix::from_rows(vec![vec![q("1")]]).unwrap(), vec![q("1")], vec![q("1")])
            .unwrap();
        let pat = PerturbationPattern::custom(Matrix::zeros(1, 1), vec![q("1")], vec![q("0")]).unwrap();
        let ilp = InflatedIntervalLp::new(&p, &pat, q("1/2")).unwrap();
        assert_eq!(best_case(&ilp).unwrap(), ExtValue::Finite(q("1/2")));
    }

    #[test]
    fn sandwich_on_example_one() {
        let p = example1("1.5").convert::<f64>();
        let ilp = InflatedIntervalLp::new(&p, &PerturbationPattern::relative(&p), 0.01).unwrap();
        let r = value_range(&ilp, DEFAULT_MAX_M).unwrap();
        let f = -2.0 / 3.0;
        assert!(r.f_low.as_f64() <= f && f <= r.f_high.as_f64());
    }

    #[test]
    fn reduce_picks_smallest_index_on_ties() {
        let v: Vec<ExtValue<f64>> = [1.0, 3.0, 2.0, 3.0].into_iter().map(ExtValue::Finite).collect();
        assert_eq!(worst_case_parallel_reduce(&v), Some((1, ExtValue::Finite(3.0))));
        assert_eq!(
            worst_case_parallel_reduce(&[ExtValue::Finite(5.0)]),
            Some((0, ExtValue::Finite(5.0)))
        );
        let w = vec![ExtValue::Finite(1.0), ExtValue::PosInf, ExtValue::NegInf];
        assert_eq!(worst_case_parallel_reduce(&w), Some((1, ExtValue::PosInf)));
    }

    #[test]
    fn too_many_constraints() {
        let p = LpProblem::standard(Matrix::<f64>::identity(3), vec![1.0; 3], vec![1.0; 3]).unwrap();
        let ilp = InflatedIntervalLp::new(&p, &PerturbationPattern::relative(&p), 0.1).unwrap();
        assert!(matches!(
            worst_case(&ilp, 2),
            Err(Error::TooManyConstraints { m: 3, limit: 2 })
        ));
    }

    #[test]
    fn infeasible_realizations_raise_warning() {
        // b - αΔb turns negative for s = (-), which is infeasible
        let p = LpProblem::standard(Matrix::from_rows(vec![vec![1.0, 1.0]]).unwrap(), vec![1.0], vec![1.0, 2.0])
            .unwrap();
        let pat = PerturbationPattern::custom(Matrix::zeros(1, 2), vec![1.0], vec![0.0, 0.0]).unwrap();
        let ilp = InflatedIntervalLp::new(&p, &pat, 2.0).unwrap();
        let w = worst_case(&ilp, DEFAULT_MAX_M).unwrap();
        assert_eq!(w.value, ExtValue::Finite(3.0));
        assert_eq!(w.warning, Some(RegularityWarning { infeasible: 1, total: 2 }));
        let neg = LpProblem::standard(p.a().clone(), vec![-1.0], p.c().to_vec()).unwrap();
        let all_bad = InflatedIntervalLp::new(&neg, &pat, 0.5).unwrap();
        assert_eq!(worst_case(&all_bad, DEFAULT_MAX_M).unwrap().value, ExtValue::PosInf);
    }
}
