use std::ops::{Index, IndexMut};

use super::{norm_inf, PrecisionCtx, Real};
use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type DenseMatrix = Matrix<Real>;

impl<T: Clone> Matrix<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Matrix { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn set_row(&mut self, i: usize, values: &[T]) {
        self.row_mut(i).clone_from_slice(values);
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize, ctx: &PrecisionCtx) -> Self {
        Matrix::filled(rows, cols, ctx.zero())
    }

    pub fn identity(n: usize, ctx: &PrecisionCtx) -> Self {
        let mut m = Self::zeros(n, n, ctx);
        for i in 0..n {
            m[(i, i)] = ctx.one();
        }
        m
    }

    pub fn mul_vec(&self, v: &[Real]) -> Vec<Real> {
        assert_eq!(v.len(), self.cols, "matrix-vector dimension mismatch");
        (0..self.rows).map(|i| super::dot(self.row(i), v)).collect()
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let zero = self.data[0].zero_like();
        let mut out = Matrix::filled(self.rows, other.cols, zero);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> Real {
        let mut best = self.data[0].zero_like();
        for i in 0..self.rows {
            let mut s = best.zero_like();
            for x in self.row(i) {
                s += x.abs();
            }
            if s > best {
                best = s;
            }
        }
        best
    }

    /// `I - self`.
    pub fn identity_minus(&self) -> DenseMatrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            let v = -&self[(i, j)];
            if i == j {
                v + 1
            } else {
                v
            }
        })
    }
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: DenseMatrix,
    perm: Vec<usize>,
    min_pivot: Real,
    norm: Real,
}

impl Lu {
    /// Factors `a`. A pivot at or below `10^(-D+8) * ||A||_inf` is reported
    /// as [`Error::SingularMatrix`].
    pub fn factor(a: &DenseMatrix, ctx: &PrecisionCtx) -> Result<Lu> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!("{}x{} is not square", a.rows(), a.cols())));
        }
        let n = a.rows();
        let norm = a.norm_inf();
        let tol = ctx.pow10(-(ctx.digits() as i32) + 8) * &norm;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut min_pivot: Option<Real> = None;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].abs();
            for i in k + 1..n {
                let v = lu[(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= tol || best.is_zero() {
                return Err(Error::SingularMatrix { column: k });
            }
            if min_pivot.as_ref().map_or(true, |m| &best < m) {
                min_pivot = Some(best.clone());
            }
            lu.swap_rows(k, p);
            perm.swap(k, p);
            let pivot = lu[(k, k)].clone();
            for i in k + 1..n {
                if lu[(i, k)].is_zero() {
                    continue;
                }
                let factor = &lu[(i, k)] / &pivot;
                for j in k + 1..n {
                    let t = &factor * &lu[(k, j)];
                    lu[(i, j)] -= t;
                }
                lu[(i, k)] = factor;
            }
        }
        let min_pivot = min_pivot.unwrap_or_else(|| ctx.zero());
        Ok(Lu { lu, perm, min_pivot, norm })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    /// Smallest pivot magnitude relative to `||A||_inf`.
    pub fn pivot_ratio(&self) -> Real {
        if self.norm.is_zero() {
            return self.norm.clone();
        }
        &self.min_pivot / &self.norm
    }

    pub fn solve(&self, b: &[Real]) -> Vec<Real> {
        let n = self.dim();
        assert_eq!(b.len(), n, "right-hand side dimension mismatch");
        let mut x: Vec<Real> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..n {
            for j in 0..i {
                let t = &self.lu[(i, j)] * &x[j];
                x[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let t = &self.lu[(i, j)] * &x[j];
                x[i] -= t;
            }
            x[i] /= &self.lu[(i, i)];
        }
        x
    }
}

/// Solves `A x = b` by pivoted elimination at context precision.
pub fn solve_linear(a: &DenseMatrix, b: &[Real], ctx: &PrecisionCtx) -> Result<Vec<Real>> {
    if a.rows() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} rows, right-hand side has {} entries",
            a.rows(),
            b.len()
        )));
    }
    Ok(Lu::factor(a, ctx)?.solve(b))
}

/// `||A x - b||_inf`.
pub fn residual_inf(a: &DenseMatrix, x: &[Real], b: &[Real]) -> Real {
    let ax = a.mul_vec(x);
    let diff: Vec<Real> = ax.iter().zip(b).map(|(p, q)| p - q).collect();
    norm_inf(&diff)
}
