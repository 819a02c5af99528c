//! Extended-precision toolkit for the period-doubling renormalization
//! fixed point: doubling operators, Newton collocation, spectra of the
//! linearized operator and their dependence on the discretization.

pub mod artifacts;
pub mod bases;
pub mod chebyshev;
pub mod error;
pub mod families;
pub mod numerics;
pub mod operators;
pub mod solver;
pub mod spectrum;

pub use error::{Error, Result};
pub use numerics::{Complex, DenseMatrix, PrecisionCtx, Real};
