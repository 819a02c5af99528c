//! Exact rational linear algebra.
//!
//! Systems are cleared of denominators row by row and reduced with
//! fraction-free (Bareiss) elimination, so every intermediate quantity is an
//! integer and every division is exact.

use rug::{Integer, Rational};

use super::Matrix;
use crate::error::{Error, Result};

pub type RationalMatrix = Matrix<Rational>;

impl RationalMatrix {
    pub fn rational_identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { Rational::from(1) } else { Rational::new() })
    }

    pub fn exact_mul(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols(), other.rows(), "matrix product dimension mismatch");
        Matrix::from_fn(self.rows(), other.cols(), |i, j| {
            let mut acc = Rational::new();
            for k in 0..self.cols() {
                let a = &self[(i, k)];
                if *a.numer() == 0 {
                    continue;
                }
                acc += Rational::from(a * &other[(k, j)]);
            }
            acc
        })
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows()).all(|i| {
                (0..self.cols()).all(|j| {
                    let v = &self[(i, j)];
                    if i == j {
                        *v == 1
                    } else {
                        *v.numer() == 0
                    }
                })
            })
    }
}

/// Solves `A X = B` exactly.
pub fn solve_linear_exact(a: &RationalMatrix, b: &RationalMatrix) -> Result<RationalMatrix> {
    let n = a.rows();
    if !a.is_square() || b.rows() != n {
        return Err(Error::DimensionMismatch(format!(
            "A is {}x{}, B has {} rows",
            a.rows(),
            a.cols(),
            b.rows()
        )));
    }
    let m = b.cols();
    let width = n + m;

    // Integer augmented matrix; scaling a row by a positive integer leaves X unchanged.
    let mut rows: Vec<Vec<Integer>> = (0..n)
        .map(|i| {
            let mut lcm = Integer::from(1);
            for q in a.row(i).iter().chain(b.row(i)) {
                lcm.lcm_mut(q.denom());
            }
            a.row(i)
                .iter()
                .chain(b.row(i))
                .map(|q| Integer::from(q.numer() * Integer::from(&lcm / q.denom())))
                .collect()
        })
        .collect();

    let mut prev = Integer::from(1);
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| rows[r][k] != 0) else {
            return Err(Error::ExactlySingular);
        };
        rows.swap(k, p);
        let (upper, lower) = rows.split_at_mut(k + 1);
        let pivot_row = &upper[k];
        let pivot = &pivot_row[k];
        for row in lower.iter_mut() {
            let lead = row[k].clone();
            for j in k + 1..width {
                let mut t = Integer::from(&row[j] * pivot);
                t -= Integer::from(&lead * &pivot_row[j]);
                t.div_exact_mut(&prev);
                row[j] = t;
            }
            row[k] = Integer::new();
        }
        prev = rows[k][k].clone();
    }

    // rows[n-1][n-1] = ±det; y = det * x is integral (Cramer), so every
    // division below is exact.
    let det = rows[n - 1][n - 1].clone();
    let mut out = Matrix::filled(n, m, Rational::new());
    for c in 0..m {
        let mut y: Vec<Integer> = vec![Integer::new(); n];
        for i in (0..n).rev() {
            let mut acc = Integer::from(&det * &rows[i][n + c]);
            for j in i + 1..n {
                acc -= Integer::from(&rows[i][j] * &y[j]);
            }
            acc.div_exact_mut(&rows[i][i]);
            y[i] = acc;
        }
        for (i, yi) in y.into_iter().enumerate() {
            out[(i, c)] = Rational::from((yi, det.clone()));
        }
    }
    Ok(out)
}
