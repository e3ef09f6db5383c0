//! Brute-force estimate of `d_w` from difference quotients of the worst-case
//! optimal value over a decreasing grid of inflation parameters.
//!
//! The quotient `q(α) = (f̄(α) - f) / α` behaves like `d_w + kα` for small
//! `α`, so a two-point linear fit through the two smallest grid points
//! removes the first-order error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::to_standard;
use crate::interval::{solve_min, worst_case, ExtValue, InflatedIntervalLp, SignVector, DEFAULT_MAX_M};
use crate::lp::LpProblem;
use crate::pattern::PerturbationPattern;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extrapolation {
    /// Report `q(α_min)` as is.
    None,
    /// Linear fit on the two smallest `α`.
    Richardson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Strictly decreasing, positive.
    pub alphas: Vec<f64>,
    pub extrapolation: Extrapolation,
    /// Sign enumeration limit on `m`.
    pub max_m: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            alphas: vec![1e-2, 1e-3, 1e-4],
            extrapolation: Extrapolation::Richardson,
            max_m: DEFAULT_MAX_M,
        }
    }
}

impl SweepConfig {
    pub fn with_alphas(alphas: Vec<f64>) -> Result<Self> {
        let cfg = SweepConfig {
            alphas,
            ..Default::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() {
            return Err(Error::InvalidSweep("empty alpha grid".into()));
        }
        if self.alphas.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::InvalidSweep("alphas must be positive".into()));
        }
        if self.alphas.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidSweep("alphas must be strictly decreasing".into()));
        }
        if self.extrapolation == Extrapolation::Richardson && self.alphas.len() < 2 {
            return Err(Error::InvalidSweep("extrapolation needs two alphas".into()));
        }
        Ok(())
    }
}

/// Result of a sweep.
#[derive(Clone, Debug)]
pub struct OracleEstimate<S> {
    pub estimate: S,
    /// `|q(α_min) - estimate|`; for [`Extrapolation::None`] the gap between
    /// the two smallest quotients.
    pub residual: S,
    /// `(α, q(α))` per grid point.
    pub quotients: Vec<(S, S)>,
    /// Maximizing sign vector per grid point.
    pub signs: Vec<SignVector>,
}

fn extrapolate<S: Scalar>(cfg: &SweepConfig, quotients: &[(S, S)]) -> (S, S) {
    let k = quotients.len();
    let (a_min, q_min) = &quotients[k - 1];
    if k < 2 {
        return (q_min.clone(), S::zero());
    }
    let (a1, q1) = &quotients[k - 2];
    match cfg.extrapolation {
        Extrapolation::None => (q_min.clone(), (q1.clone() - q_min.clone()).abs()),
        Extrapolation::Richardson => {
            let d = (a1.clone() * q_min.clone() - a_min.clone() * q1.clone())
                / (a1.clone() - a_min.clone());
            let residual = (q_min.clone() - d.clone()).abs();
            (d, residual)
        }
    }
}

fn nominal_value<S: Scalar>(problem: &LpProblem<S>) -> Result<S> {
    match solve_min(problem)?.0 {
        ExtValue::Finite(f) => Ok(f),
        ExtValue::PosInf => Err(Error::Infeasible),
        ExtValue::NegInf => Err(Error::Unbounded),
    }
}

fn require_finite<S: Scalar>(v: ExtValue<S>, alpha: f64) -> Result<S> {
    match v {
        ExtValue::Finite(v) => Ok(v),
        ExtValue::PosInf => Err(Error::RegularityViolation(format!(
            "infeasible realization at alpha = {alpha}"
        ))),
        ExtValue::NegInf => Err(Error::RegularityViolation(format!(
            "unbounded realization at alpha = {alpha}"
        ))),
    }
}

/// Estimates `d_w` by sign enumeration at every grid point. Values refer to
/// the minimization form of `problem`, which may be in any form.
pub fn estimate_dw<S: Scalar>(
    problem: &LpProblem<S>,
    pattern: &PerturbationPattern<S>,
    cfg: &SweepConfig,
) -> Result<OracleEstimate<S>> {
    cfg.validate()?;
    let t = to_standard(problem, pattern)?;
    let f = nominal_value(&t.problem)?;
    let mut quotients = Vec::with_capacity(cfg.alphas.len());
    let mut signs = Vec::with_capacity(cfg.alphas.len());
    for &alpha in &cfg.alphas {
        let a = S::from_f64(alpha);
        let ilp = InflatedIntervalLp::new(&t.problem, &t.pattern, a.clone())?;
        let worst = worst_case(&ilp, cfg.max_m)?;
        if let Some(w) = &worst.warning {
            return Err(Error::RegularityViolation(format!("{w} at alpha = {alpha}")));
        }
        let v = require_finite(worst.value, alpha)?;
        quotients.push((a.clone(), (v - f.clone()) / a));
        signs.push(worst.argmax_sign);
    }
    let (estimate, residual) = extrapolate(cfg, &quotients);
    Ok(OracleEstimate {
        estimate,
        residual,
        quotients,
        signs,
    })
}

/// Derivative of `α ↦ f(A - α diag(s) ΔA, b + α diag(s) Δb, c + αΔc)` at
/// zero, estimated on the same grid.
///
/// The maximum over all `s` agrees with [`estimate_dw`] whenever one sign
/// vector is maximal at the two smallest grid points.
pub fn fixed_sign_derivative<S: Scalar>(
    problem: &LpProblem<S>,
    pattern: &PerturbationPattern<S>,
    s: &SignVector,
    cfg: &SweepConfig,
) -> Result<S> {
    cfg.validate()?;
    if s.len() != problem.m() {
        return Err(Error::DimensionMismatch(format!(
            "sign vector of length {} for {} constraints",
            s.len(),
            problem.m()
        )));
    }
    let t = to_standard(problem, pattern)?;
    let f = nominal_value(&t.problem)?;
    let quotients = cfg
        .alphas
        .iter()
        .map(|&alpha| {
            let a = S::from_f64(alpha);
            let ilp = InflatedIntervalLp::new(&t.problem, &t.pattern, a.clone())?;
            let v = require_finite(solve_min(&ilp.realization(s))?.0, alpha)?;
            Ok((a.clone(), (v - f.clone()) / a))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(extrapolate(cfg, &quotients).0)
}
