//! Numeric substrate: extended-precision reals, exact rationals, dense
//! linear solves and a nonsymmetric eigensolver.

mod complex;
mod eigen;
mod exact;
mod matrix;
pub(crate) mod precision;
mod real;

pub use complex::Complex;
pub use eigen::{eig_dense, eigenvalues, EigenPair};
pub use exact::{solve_linear_exact, RationalMatrix};
pub use matrix::{residual_inf, solve_linear, DenseMatrix, Lu, Matrix};
pub use precision::PrecisionCtx;
pub use real::{dot, norm_inf, Real};
