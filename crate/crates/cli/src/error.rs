use serde::Serialize;
use thiserror::Error;

use feigen_core::Error as CoreError;

/// Failures of a command, grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{message}")]
    Config { message: String, hint: Option<String> },

    #[error("{message}")]
    Solver { message: String, hint: Option<String> },

    #[error("{message}")]
    Verification { message: String },

    #[error("{message}")]
    Eigen { message: String },
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config { message: message.into(), hint: None }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Solver { .. } => 3,
            CliError::Verification { .. } => 4,
            CliError::Eigen { .. } => 5,
        }
    }

    fn hint(&self) -> Option<String> {
        match self {
            CliError::Config { hint, .. } | CliError::Solver { hint, .. } => hint.clone(),
            CliError::Verification { .. } => Some("see the verification table on stdout".into()),
            CliError::Eigen { .. } => Some("raise --digits or lower --nodes".into()),
        }
    }

    /// `{code, message, hint}` as one JSON line.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Report<'a> {
            code: i32,
            message: &'a str,
            hint: Option<String>,
        }
        let message = self.to_string();
        serde_json::to_string(&Report { code: self.exit_code(), message: &message, hint: self.hint() })
            .unwrap_or_else(|_| format!("{{\"code\":{},\"message\":\"unserializable error\"}}", self.exit_code()))
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let message = e.to_string();
        match e {
            CoreError::SingularJacobian { .. } => CliError::Solver {
                message,
                hint: Some("for T3/T4 the fixed points form a family; pin one with --pin g0=1".into()),
            },
            CoreError::NewtonNoConvergence { .. } => CliError::Solver {
                message,
                hint: Some("start closer to the solution with --seed-file, or change --nodes".into()),
            },
            CoreError::WrongBranch { .. } => CliError::Solver {
                message,
                hint: Some("the seed converged to a different extremum order; supply --seed-file".into()),
            },
            CoreError::SingularMatrix { .. } | CoreError::ExactlySingular | CoreError::DivideByZero(_) => {
                CliError::Solver { message, hint: None }
            }
            CoreError::EigenNoConvergence(_) | CoreError::AmbiguousMatch { .. } => CliError::Eigen { message },
            CoreError::NoExplicitForm { .. } => CliError::Verification { message },
            CoreError::InvalidBasis(_) => CliError::Config {
                message,
                hint: Some("check --basis, --dim and --constrain".into()),
            },
            CoreError::InvalidPrecision(_)
            | CoreError::DimensionMismatch(_)
            | CoreError::InvalidIndex(_)
            | CoreError::Parse(_)
            | CoreError::Extrapolation(_) => CliError::Config { message, hint: None },
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config { message: e.to_string(), hint: None }
    }
}
