use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = DpcError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum DpcError {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    Dimension {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("insufficient data: need {needed} samples, have {available}")]
    InsufficientData { needed: usize, available: usize },

    #[error("degenerate training data: input excitation is rank deficient at time lag {lag}")]
    DegenerateData { lag: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("solver setup failed: {0}")]
    Setup(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl DpcError {
    pub(crate) fn dim(context: &'static str, expected: usize, actual: usize) -> Self {
        DpcError::Dimension {
            context,
            expected,
            actual,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        DpcError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        DpcError::Parse {
            path: path.into(),
            message: message.to_string(),
        }
    }
}
