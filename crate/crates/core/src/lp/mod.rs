//! Dense LP data, the revised simplex solver and optimal-basis enumeration.

mod bases;
mod simplex;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

pub use bases::{basic_solution, dual_solution, enumerate_optimal_bases, BasisEntry, OptimalBases};
pub use simplex::solve;

/// Default cap on the number of optimal bases explored.
pub const DEFAULT_BASIS_CAP: usize = 1000;

/// Constraint layout of an [`LpProblem`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Form {
    /// `Ax = b, x >= 0`
    Standard,
    /// `Ax <= b, x >= 0`
    IneqNonneg,
    /// `Ax <= b`, `x` free
    IneqFree,
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Form::Standard => "standard",
            Form::IneqNonneg => "ineq_nonneg",
            Form::IneqFree => "ineq_free",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Min,
    Max,
}

/// A linear program `opt cᵀx` over one of the three constraint [`Form`]s.
#[derive(Clone, Debug, PartialEq)]
pub struct LpProblem<S> {
    a: Matrix<S>,
    b: Vec<S>,
    c: Vec<S>,
    form: Form,
    sense: Sense,
}

impl<S: Scalar> LpProblem<S> {
    pub fn new(a: Matrix<S>, b: Vec<S>, c: Vec<S>, form: Form, sense: Sense) -> Result<Self> {
        if b.len() != a.rows() {
            return Err(Error::DimensionMismatch(format!(
                "b has length {} but A has {} rows",
                b.len(),
                a.rows()
            )));
        }
        if c.len() != a.cols() {
            return Err(Error::DimensionMismatch(format!(
                "c has length {} but A has {} columns",
                c.len(),
                a.cols()
            )));
        }
        Ok(LpProblem { a, b, c, form, sense })
    }

    /// `min cᵀx  s.t.  Ax = b, x >= 0`.
    pub fn standard(a: Matrix<S>, b: Vec<S>, c: Vec<S>) -> Result<Self> {
        Self::new(a, b, c, Form::Standard, Sense::Min)
    }

    pub fn a(&self) -> &Matrix<S> {
        &self.a
    }

    pub fn b(&self) -> &[S] {
        &self.b
    }

    pub fn c(&self) -> &[S] {
        &self.c
    }

    pub fn form(&self) -> Form {
        self.form
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    /// Number of constraints.
    pub fn m(&self) -> usize {
        self.a.rows()
    }

    /// Number of variables.
    pub fn n(&self) -> usize {
        self.a.cols()
    }

    /// Objective of the equivalent minimization (`-c` for maximization).
    pub fn min_objective(&self) -> Vec<S> {
        match self.sense {
            Sense::Min => self.c.clone(),
            Sense::Max => self.c.iter().map(|v| -v.clone()).collect(),
        }
    }

    /// The same problem written as a minimization.
    pub fn to_min(&self) -> Self {
        LpProblem {
            a: self.a.clone(),
            b: self.b.clone(),
            c: self.min_objective(),
            form: self.form,
            sense: Sense::Min,
        }
    }

    pub(crate) fn require_form(&self, form: Form) -> Result<()> {
        if self.form == form {
            Ok(())
        } else {
            Err(Error::WrongForm {
                expected: form.to_string(),
                found: self.form.to_string(),
            })
        }
    }

    /// Converts the data to another backend.
    pub fn convert<T: Scalar>(&self) -> LpProblem<T> {
        LpProblem {
            a: self.a.map(crate::scalar::convert),
            b: self.b.iter().map(crate::scalar::convert).collect(),
            c: self.c.iter().map(crate::scalar::convert).collect(),
            form: self.form,
            sense: self.sense,
        }
    }

    /// Scales `A`, `b` and `c` by `beta`.
    pub fn scaled(&self, beta: &S) -> Self {
        LpProblem {
            a: self.a.map(|v| v.clone() * beta.clone()),
            b: self.b.iter().map(|v| v.clone() * beta.clone()).collect(),
            c: self.c.iter().map(|v| v.clone() * beta.clone()).collect(),
            form: self.form,
            sense: self.sense,
        }
    }

    /// Drops linearly dependent rows of a standard-form problem.
    ///
    /// Fails with [`Error::Infeasible`] when a dropped row's right-hand side
    /// is inconsistent with the kept rows.
    pub fn without_dependent_rows(&self) -> Result<Self> {
        self.require_form(Form::Standard)?;
        let keep = crate::linalg::independent_rows(&self.a);
        if keep.len() == self.m() {
            return Ok(self.clone());
        }
        let augmented = self.a.hstack(&Matrix::from_fn(self.m(), 1, |i, _| self.b[i].clone()));
        if crate::linalg::rank(&augmented) != keep.len() {
            return Err(Error::Infeasible);
        }
        Ok(LpProblem {
            a: self.a.select_rows(&keep),
            b: keep.iter().map(|&i| self.b[i].clone()).collect(),
            c: self.c.clone(),
            form: self.form,
            sense: self.sense,
        })
    }
}

/// Sorted set of `m` basic column indices (0-based).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Basis(Vec<usize>);

impl Basis {
    /// Sorts and validates the indices against `n` columns.
    pub fn new(mut indices: Vec<usize>, n: usize) -> Result<Self> {
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DimensionMismatch("repeated basis index".into()));
        }
        if indices.last().is_some_and(|&j| j >= n) {
            return Err(Error::DimensionMismatch(format!(
                "basis index out of range for {n} columns"
            )));
        }
        Ok(Basis(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.0.binary_search(&j).is_ok()
    }

    /// Nonbasic indices `N = {0..n} \ B`.
    pub fn complement(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|&j| !self.contains(j)).collect()
    }

    /// The basis obtained by exchanging `leaving` for `entering`.
    pub fn exchange(&self, leaving: usize, entering: usize) -> Basis {
        let mut v: Vec<usize> = self.0.iter().copied().filter(|&j| j != leaving).collect();
        v.push(entering);
        v.sort_unstable();
        Basis(v)
    }
}

/// Printed with 1-based indices, e.g. `{1, 2}`.
impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, j) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", j + 1)?;
        }
        f.write_str("}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of [`solve`].
#[derive(Clone, Debug, PartialEq)]
pub enum LpSolution<S> {
    Optimal(Optimum<S>),
    Infeasible,
    Unbounded,
}

impl<S> LpSolution<S> {
    pub fn status(&self) -> Status {
        match self {
            LpSolution::Optimal(_) => Status::Optimal,
            LpSolution::Infeasible => Status::Infeasible,
            LpSolution::Unbounded => Status::Unbounded,
        }
    }

    pub fn optimum(&self) -> Option<&Optimum<S>> {
        match self {
            LpSolution::Optimal(o) => Some(o),
            _ => None,
        }
    }

    /// The optimum, or the matching [`Error`] for other statuses.
    pub fn into_optimum(self) -> Result<Optimum<S>> {
        match self {
            LpSolution::Optimal(o) => Ok(o),
            LpSolution::Infeasible => Err(Error::Infeasible),
            LpSolution::Unbounded => Err(Error::Unbounded),
        }
    }
}

/// A basic optimal solution together with its dual.
///
/// `y` and `reduced_costs` refer to the minimization form, so for a
/// maximization problem they are the duals of `min -cᵀx`. `objective` is
/// reported in the problem's own sense.
#[derive(Clone, Debug, PartialEq)]
pub struct Optimum<S> {
    pub x: Vec<S>,
    pub y: Vec<S>,
    pub basis: Basis,
    pub objective: S,
    pub reduced_costs: Vec<S>,
    pub primal_degenerate: bool,
    pub dual_degenerate: bool,
}

impl<S: Scalar> Optimum<S> {
    /// Nondegenerate in both senses, which certifies a unique primal optimum
    /// with a unique dual.
    pub fn is_unique_nondegenerate(&self) -> bool {
        !self.primal_degenerate && !self.dual_degenerate
    }

    /// Objective value of the minimization form.
    pub fn min_objective(&self, sense: Sense) -> S {
        match sense {
            Sense::Min => self.objective.clone(),
            Sense::Max => -self.objective.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_checks() {
        let a = Matrix::<f64>::zeros(2, 3);
        assert!(LpProblem::standard(a.clone(), vec![0.0; 2], vec![0.0; 3]).is_ok());
        assert!(matches!(
            LpProblem::standard(a.clone(), vec![0.0; 3], vec![0.0; 3]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            LpProblem::standard(a, vec![0.0; 2], vec![0.0; 2]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn basis_validation_and_display() {
        let b = Basis::new(vec![2, 0], 3).unwrap();
        assert_eq!(b.indices(), &[0, 2]);
        assert_eq!(b.to_string(), "{1, 3}");
        assert_eq!(b.complement(4), vec![1, 3]);
        assert_eq!(b.exchange(0, 1).indices(), &[1, 2]);
        assert!(Basis::new(vec![1, 1], 3).is_err());
        assert!(Basis::new(vec![3], 3).is_err());
    }

    #[test]
    fn dependent_rows_dropped_only_when_consistent() {
        let a = Matrix::from_rows(vec![vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        let p = LpProblem::standard(a.clone(), vec![1.0, 2.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(p.without_dependent_rows().unwrap().m(), 1);
        let q = LpProblem::standard(a, vec![1.0, 3.0], vec![1.0, 1.0]).unwrap();
        assert!(matches!(q.without_dependent_rows(), Err(Error::Infeasible)));
    }
}
