//! Perturbation patterns `(ΔA, Δb, Δc)`: the nonnegative radii by which the
//! nominal data are inflated to intervals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::lp::LpProblem;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternKind {
    /// `ΔA = |A|, Δb = |b|, Δc = |c|`
    Relative,
    /// All radii equal to one.
    Absolute,
    Custom,
}

/// A single data coefficient, 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coefficient {
    Obj(usize),
    Rhs(usize),
    MatEntry(usize, usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationPattern<S> {
    da: Matrix<S>,
    db: Vec<S>,
    dc: Vec<S>,
    kind: PatternKind,
}

impl<S: Scalar> PerturbationPattern<S> {
    pub fn relative(problem: &LpProblem<S>) -> Self {
        PerturbationPattern {
            da: problem.a().map(|v| v.abs()),
            db: problem.b().iter().map(|v| v.abs()).collect(),
            dc: problem.c().iter().map(|v| v.abs()).collect(),
            kind: PatternKind::Relative,
        }
    }

    pub fn absolute(problem: &LpProblem<S>) -> Self {
        let (m, n) = (problem.m(), problem.n());
        PerturbationPattern {
            da: Matrix::from_fn(m, n, |_, _| S::one()),
            db: vec![S::one(); m],
            dc: vec![S::one(); n],
            kind: PatternKind::Absolute,
        }
    }

    pub fn zero(m: usize, n: usize) -> Self {
        PerturbationPattern {
            da: Matrix::zeros(m, n),
            db: vec![S::zero(); m],
            dc: vec![S::zero(); n],
            kind: PatternKind::Custom,
        }
    }

    /// Unit radius on one coefficient, zero elsewhere.
    pub fn single(m: usize, n: usize, which: Coefficient) -> Result<Self> {
        let mut p = Self::zero(m, n);
        match which {
            Coefficient::Obj(j) if j < n => p.dc[j] = S::one(),
            Coefficient::Rhs(i) if i < m => p.db[i] = S::one(),
            Coefficient::MatEntry(i, j) if i < m && j < n => p.da[(i, j)] = S::one(),
            other => {
                return Err(Error::DimensionMismatch(format!(
                    "{other:?} outside a {m}x{n} problem"
                )))
            }
        }
        Ok(p)
    }

    /// Arbitrary nonnegative radii.
    pub fn custom(da: Matrix<S>, db: Vec<S>, dc: Vec<S>) -> Result<Self> {
        if db.len() != da.rows() || dc.len() != da.cols() {
            return Err(Error::DimensionMismatch(format!(
                "pattern blocks {}x{}, {}, {} are inconsistent",
                da.rows(),
                da.cols(),
                db.len(),
                dc.len()
            )));
        }
        if da.entries().chain(&db).chain(&dc).any(|v| *v < S::zero()) {
            return Err(Error::InvalidPattern("entries must be nonnegative".into()));
        }
        Ok(PerturbationPattern {
            da,
            db,
            dc,
            kind: PatternKind::Custom,
        })
    }

    pub fn da(&self) -> &Matrix<S> {
        &self.da
    }

    pub fn db(&self) -> &[S] {
        &self.db
    }

    pub fn dc(&self) -> &[S] {
        &self.dc
    }

    pub fn kind(&self) -> PatternKind {
        self.kind
    }

    pub fn check_dims(&self, problem: &LpProblem<S>) -> Result<()> {
        if self.da.rows() != problem.m() || self.da.cols() != problem.n() {
            return Err(Error::DimensionMismatch(format!(
                "pattern is {}x{} but problem is {}x{}",
                self.da.rows(),
                self.da.cols(),
                problem.m(),
                problem.n()
            )));
        }
        Ok(())
    }

    /// Sum of squares of every entry of `(ΔA, Δb, Δc)`, exact on the rational backend.
    pub fn frobenius_norm_sq(&self) -> S {
        self.da
            .entries()
            .chain(&self.db)
            .chain(&self.dc)
            .fold(S::zero(), |acc, v| acc + v.clone() * v.clone())
    }

    /// `‖(ΔA, Δb, Δc)‖_F`.
    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sq().as_f64().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.da.entries().chain(&self.db).chain(&self.dc).all(|v| v.is_zero())
    }

    /// `ΔA = 0` and `Δb = 0`.
    pub fn is_objective_only(&self) -> bool {
        self.da.entries().chain(&self.db).all(|v| v.is_zero())
    }

    /// `γ · (ΔA, Δb, Δc)`; the kind becomes `Custom` unless `γ = 1`.
    pub fn scaled(&self, gamma: &S) -> Self {
        PerturbationPattern {
            da: self.da.map(|v| v.clone() * gamma.clone()),
            db: self.db.iter().map(|v| v.clone() * gamma.clone()).collect(),
            dc: self.dc.iter().map(|v| v.clone() * gamma.clone()).collect(),
            kind: if gamma.is_one() { self.kind } else { PatternKind::Custom },
        }
    }

    /// Zeroes the columns in `cols` (fixed data such as slack columns).
    pub fn with_fixed_columns(&self, cols: std::ops::Range<usize>) -> Self {
        let mut out = self.clone();
        for i in 0..out.da.rows() {
            for j in cols.clone() {
                out.da[(i, j)] = S::zero();
            }
        }
        for j in cols {
            out.dc[j] = S::zero();
        }
        out.kind = PatternKind::Custom;
        out
    }

    pub(crate) fn from_parts(da: Matrix<S>, db: Vec<S>, dc: Vec<S>, kind: PatternKind) -> Self {
        PerturbationPattern { da, db, dc, kind }
    }

    pub fn convert<T: Scalar>(&self) -> PerturbationPattern<T> {
        PerturbationPattern {
            da: self.da.map(crate::scalar::convert),
            db: self.db.iter().map(crate::scalar::convert).collect(),
            dc: self.dc.iter().map(crate::scalar::convert).collect(),
            kind: self.kind,
        }
    }
}
