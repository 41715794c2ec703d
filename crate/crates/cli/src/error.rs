use thiserror::Error;

use spinlab::Error as CoreError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("validation failed: {0}")]
    Validation(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o failure on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

impl From<CoreError> for CliError {
    /// Bad inputs that only surface inside a pipeline still count as
    /// validation failures.
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidChain(_)
            | CoreError::NotXxLimit { .. }
            | CoreError::InvalidGrid(_)
            | CoreError::InvalidState(_)
            | CoreError::SizeLimit { .. }
            | CoreError::InvalidParameter(_) => CliError::Validation(e.to_string()),
            CoreError::NoConvergence { .. }
            | CoreError::AmplitudeOutOfRange(_)
            | CoreError::ModeNoConvergence { .. }
            | CoreError::Propagation(_) => CliError::Numerical(e.to_string()),
        }
    }
}
