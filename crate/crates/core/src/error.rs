use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed arguments: wrong sizes, bad index sets, invalid parameters.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// The input lies outside the region where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// An iterative method failed to reach its tolerance.
    #[error("numeric error: {message}")]
    Numeric {
        message: String,
        best_estimate: Option<f64>,
    },
    /// A consistency check that should hold by construction failed.
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn numeric(message: impl Into<String>) -> Self {
        Error::Numeric {
            message: message.into(),
            best_estimate: None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
