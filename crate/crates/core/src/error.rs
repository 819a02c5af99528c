use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("precision of {0} decimal digits is below the supported minimum of 16")]
    InvalidPrecision(u32),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("singular matrix: pivot in column {column} is below the elimination tolerance")]
    SingularMatrix { column: usize },

    #[error("matrix is exactly singular over the rationals")]
    ExactlySingular,

    #[error("QR iteration budget exhausted while isolating eigenvalue {0}")]
    EigenNoConvergence(usize),

    #[error("scaling constant is undefined: {0} vanishes")]
    DivideByZero(&'static str),

    #[error("explicit eigenfunction index k = {0} is not admissible")]
    InvalidIndex(i64),

    #[error("no explicit eigenfunction is known for {variant} with even k = {k}")]
    NoExplicitForm { variant: String, k: i64 },

    #[error(
        "Jacobian is numerically singular at Newton iteration {iteration} (pivot ratio {pivot_ratio:.3e}); \
         either the derivative has eigenvalue 1 (a family of fixed points) or the basis is badly conditioned"
    )]
    SingularJacobian { iteration: usize, pivot_ratio: f64 },

    #[error("Newton iteration did not converge in {} iterations", history.len())]
    NewtonNoConvergence { history: Vec<f64> },

    #[error("eigenvalue {index} matches several powers of alpha: k in {ks:?}")]
    AmbiguousMatch { index: usize, ks: Vec<i32> },

    #[error("converged solution has extremum order {found}, expected {expected}")]
    WrongBranch { expected: u32, found: u32 },

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("extrapolation outside [-1, 1] not allowed: {0}")]
    Extrapolation(String),
}
