use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Inputs whose shapes do not line up (matrix vs. labels, plan vs. measures).
    #[error("structural error: {0}")]
    Structural(String),

    /// An argument outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A documented precondition (e.g. the wedge hypothesis) was not met.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// The request is well-formed but exceeds a configured limit.
    #[error("refused: {0}")]
    Refused(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: u64,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
