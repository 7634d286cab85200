use thiserror::Error;

/// Errors produced anywhere in the decomposition pipeline.
#[derive(Debug, Error)]
pub enum DmdError {
    /// Caller supplied inconsistent or invalid input.
    #[error("invalid input: {0}")]
    Input(String),

    /// A linear system was numerically singular and no regularization was requested.
    #[error("singular matrix ({context}): condition estimate {condition:.3e}")]
    Singular { context: String, condition: f64 },

    /// An iterative routine failed to converge.
    #[error("eigensolver did not converge on a {size}x{size} matrix within {budget} iterations")]
    NoConvergence { size: usize, budget: usize },

    /// A data or model file could not be parsed.
    #[error("format error at {location}: {message}")]
    Format { location: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl DmdError {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        DmdError::Input(msg.into())
    }

    pub(crate) fn format(location: impl Into<String>, message: impl Into<String>) -> Self {
        DmdError::Format {
            location: location.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, DmdError>;
