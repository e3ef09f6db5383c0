//! Dense matrices and LU factorization over any [`Scalar`].

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    /// Builds a matrix from row vectors. Returns `None` on ragged input.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Option<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        let n_rows = rows.len();
        Some(Matrix {
            rows: n_rows,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Matrix with `rows` rows and zero columns or vice versa is allowed.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [S] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &S> {
        self.data.iter()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// `self * x`.
    pub fn mul_vec(&self, x: &[S]) -> Vec<S> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| crate::scalar::dot(self.row(i), x))
            .collect()
    }

    /// `selfᵀ * y`.
    pub fn tr_mul_vec(&self, y: &[S]) -> Vec<S> {
        debug_assert_eq!(y.len(), self.rows);
        let mut out = vec![S::zero(); self.cols];
        for (i, yi) in y.iter().enumerate() {
            if yi.is_zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o = o.clone() + a.clone() * yi.clone();
            }
        }
        out
    }

    /// Submatrix formed by the given columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |i, k| self[(i, cols[k])].clone())
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self::from_fn(rows.len(), self.cols, |k, j| self[(rows[k], j)].clone())
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }

    /// `[self; other]`.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Induced 1-norm (max column sum) as a float.
    pub fn norm1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].as_f64().abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;

    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

/// The factorized matrix was singular (to working precision on floats).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Singular;

/// `P A = L U` with partial pivoting, stored compactly.
#[derive(Clone, Debug)]
pub struct Lu<S> {
    lu: Matrix<S>,
    perm: Vec<usize>,
}

impl<S: Scalar> Lu<S> {
    pub fn factor(a: &Matrix<S>) -> Result<Self, Singular> {
        assert_eq!(a.rows(), a.cols(), "LU of a non-square matrix");
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = lu.entries().map(|v| v.as_f64().abs()).fold(0.0, f64::max);
        for k in 0..n {
            let pivot_row = pivot_in_column(&lu, k, k);
            let Some(p) = pivot_row else {
                return Err(Singular);
            };
            if !S::EXACT && lu[(p, k)].as_f64().abs() <= 1e-13 * scale.max(1.0) {
                return Err(Singular);
            }
            if p != k {
                swap_rows(&mut lu, p, k);
                perm.swap(p, k);
            }
            let pivot = lu[(k, k)].clone();
            for i in k + 1..n {
                if lu[(i, k)].is_zero() {
                    continue;
                }
                let factor = lu[(i, k)].clone() / pivot.clone();
                for j in k + 1..n {
                    let v = lu[(i, j)].clone() - factor.clone() * lu[(k, j)].clone();
                    lu[(i, j)] = v;
                }
                lu[(i, k)] = factor;
            }
        }
        Ok(Lu { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    /// Solves `A x = rhs`.
    pub fn solve(&self, rhs: &[S]) -> Vec<S> {
        let n = self.dim();
        let mut x: Vec<S> = self.perm.iter().map(|&p| rhs[p].clone()).collect();
        for i in 0..n {
            let mut v = x[i].clone();
            for j in 0..i {
                v = v - self.lu[(i, j)].clone() * x[j].clone();
            }
            x[i] = v;
        }
        for i in (0..n).rev() {
            let mut v = x[i].clone();
            for j in i + 1..n {
                v = v - self.lu[(i, j)].clone() * x[j].clone();
            }
            x[i] = v / self.lu[(i, i)].clone();
        }
        x
    }

    /// Solves `Aᵀ y = rhs`.
    pub fn solve_transpose(&self, rhs: &[S]) -> Vec<S> {
        let n = self.dim();
        // Uᵀ z = rhs
        let mut z: Vec<S> = rhs.to_vec();
        for i in 0..n {
            let mut v = z[i].clone();
            for j in 0..i {
                v = v - self.lu[(j, i)].clone() * z[j].clone();
            }
            z[i] = v / self.lu[(i, i)].clone();
        }
        // Lᵀ w = z
        for i in (0..n).rev() {
            let mut v = z[i].clone();
            for j in i + 1..n {
                v = v - self.lu[(j, i)].clone() * z[j].clone();
            }
            z[i] = v;
        }
        let mut y = vec![S::zero(); n];
        for (k, &p) in self.perm.iter().enumerate() {
            y[p] = z[k].clone();
        }
        y
    }

    pub fn inverse(&self) -> Matrix<S> {
        let n = self.dim();
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![S::zero(); n];
        for j in 0..n {
            e[j] = S::one();
            let col = self.solve(&e);
            for (i, v) in col.into_iter().enumerate() {
                inv[(i, j)] = v;
            }
            e[j] = S::zero();
        }
        inv
    }
}

fn pivot_in_column<S: Scalar>(m: &Matrix<S>, col: usize, from: usize) -> Option<usize> {
    if S::EXACT {
        // Any nonzero pivot is exact; the first one keeps entries small.
        return (from..m.rows()).find(|&i| !m[(i, col)].is_zero());
    }
    let mut best: Option<(usize, S)> = None;
    for i in from..m.rows() {
        let v = m[(i, col)].abs();
        if v.is_zero() {
            continue;
        }
        if best.as_ref().is_none_or(|(_, b)| v > *b) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}

fn swap_rows<S: Scalar>(m: &mut Matrix<S>, a: usize, b: usize) {
    if a == b {
        return;
    }
    for j in 0..m.cols() {
        let tmp = m[(a, j)].clone();
        m[(a, j)] = m[(b, j)].clone();
        m[(b, j)] = tmp;
    }
}

/// Indices of a maximal set of linearly independent rows, in increasing order.
///
/// Float rank decisions use a relative threshold of `1e-9` on the eliminated
/// entries.
pub fn independent_rows<S: Scalar>(a: &Matrix<S>) -> Vec<usize> {
    // Eliminate on the transpose so that pivots identify original rows.
    let mut t = a.transpose();
    let (n, m) = (t.rows(), t.cols());
    let scale = a.entries().map(|v| v.as_f64().abs()).fold(0.0, f64::max).max(1.0);
    let mut chosen = Vec::new();
    let mut row = 0;
    for col in 0..m {
        if row == n {
            break;
        }
        let p = if S::EXACT {
            (row..n).find(|&i| !t[(i, col)].is_zero())
        } else {
            pivot_in_column(&t, col, row)
                .filter(|&i| t[(i, col)].as_f64().abs() > 1e-9 * scale)
        };
        let Some(p) = p else { continue };
        swap_rows(&mut t, p, row);
        let pivot = t[(row, col)].clone();
        for i in row + 1..n {
            if t[(i, col)].is_zero() {
                continue;
            }
            let factor = t[(i, col)].clone() / pivot.clone();
            for j in col..m {
                let v = t[(i, j)].clone() - factor.clone() * t[(row, j)].clone();
                t[(i, j)] = v;
            }
        }
        chosen.push(col);
        row += 1;
    }
    chosen
}

pub fn rank<S: Scalar>(a: &Matrix<S>) -> usize {
    independent_rows(a).len()
}
