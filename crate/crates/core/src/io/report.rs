//! The serializable analysis report.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;
use crate::sensitivity::{Grade, Method, SensitivityReport};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisRow {
    /// 1-based column indices of the standardized problem.
    pub basis: Vec<usize>,
    pub d_w: f64,
    pub d_r: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub estimate: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub problem: String,
    pub form: String,
    pub vars: usize,
    pub constr: usize,
    pub backend: String,
    pub pattern: String,
    pub objective: f64,
    /// Exact value on the rational backend.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective_exact: Option<String>,
    pub d_w: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_w_exact: Option<String>,
    pub d_r: f64,
    pub grade: Grade,
    pub method: Method,
    pub pattern_norm: f64,
    pub per_basis: Vec<BasisRow>,
    pub truncated: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_sign: Option<Vec<i8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub seconds: f64,
}

/// What the report does not know about itself.
#[derive(Clone, Debug)]
pub struct ReportMeta {
    pub problem: String,
    pub form: String,
    pub vars: usize,
    pub constr: usize,
    pub pattern: String,
    pub seconds: f64,
}

impl ReportDocument {
    pub fn new<S: Scalar>(report: &SensitivityReport<S>, meta: ReportMeta) -> Self {
        let exact = |v: &S| S::EXACT.then(|| v.to_string());
        ReportDocument {
            problem: meta.problem,
            form: meta.form,
            vars: meta.vars,
            constr: meta.constr,
            backend: if S::EXACT { "rational" } else { "float" }.into(),
            pattern: meta.pattern,
            objective: report.objective.as_f64(),
            objective_exact: exact(&report.objective),
            d_w: report.d_w.as_f64(),
            d_w_exact: exact(&report.d_w),
            d_r: report.d_r,
            grade: report.grade,
            method: report.method,
            pattern_norm: report.pattern_norm,
            per_basis: report
                .per_basis
                .iter()
                .map(|b| BasisRow {
                    basis: b.basis.indices().iter().map(|j| j + 1).collect(),
                    d_w: b.d_w.as_f64(),
                    d_r: b.d_r,
                })
                .collect(),
            truncated: report.truncated,
            worst_sign: report.worst_sign.as_ref().map(|s| s.signs().to_vec()),
            oracle: report.oracle.as_ref().map(|o| OracleRow {
                estimate: o.estimate,
                residual: o.residual,
            }),
            notes: report.notes.clone(),
            seconds: meta.seconds,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is always serializable")
    }

    pub fn from_json(text: &str) -> crate::Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Human-readable summary.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "problem   {} ({}, {} vars, {} constr)", self.problem, self.form, self.vars, self.constr);
        let _ = writeln!(s, "pattern   {} (norm {:.6})", self.pattern, self.pattern_norm);
        let _ = writeln!(s, "f(A,b,c)  {}", self.objective_exact.clone().unwrap_or(format!("{:.10}", self.objective)));
        let _ = writeln!(s, "d_w       {:.6}{}", self.d_w, self.d_w_exact.as_ref().map(|e| format!(" = {e}")).unwrap_or_default());
        let _ = writeln!(s, "d_r       {:.6}", self.d_r);
        let _ = writeln!(s, "grade     {} (method {})", self.grade, self.method);
        if self.per_basis.len() > 1 || self.truncated {
            let _ = writeln!(s, "bases     {}{}", self.per_basis.len(), if self.truncated { " (truncated)" } else { "" });
            for b in self.per_basis.iter().take(20) {
                let _ = writeln!(s, "  {:?}  d_w(B) {:.6}  d_r(B) {:.6}", b.basis, b.d_w, b.d_r);
            }
        }
        if let Some(sign) = &self.worst_sign {
            let signs: String = sign.iter().map(|v| if *v > 0 { '+' } else { '-' }).collect();
            let _ = writeln!(s, "sign      {signs}");
        }
        if let Some(o) = &self.oracle {
            let _ = writeln!(s, "oracle    {:.6} (residual {:.2e})", o.estimate, o.residual);
        }
        for n in &self.notes {
            let _ = writeln!(s, "note      {n}");
        }
        let _ = writeln!(s, "time      {:.3}s", self.seconds);
        s
    }
}
