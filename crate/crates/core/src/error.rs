use num_bigint::BigUint;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid key: {0}")]
    InvalidKey(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    /// A configured memory cap was hit. `partial` holds every term finished
    /// before the limit, so `completed == partial.len()`.
    #[error("resource limit after {completed} completed term(s): {reason}")]
    ResourceLimit {
        completed: usize,
        partial: Vec<BigUint>,
        reason: String,
    },

    #[error("needs {shortfall} more term(s): {reason}")]
    NeedsMoreData { shortfall: usize, reason: String },

    #[error("leading coefficient vanishes at n = {0}")]
    SingularPoint(i64),

    #[error("recurrence contradicts the supplied terms at n = {0}")]
    Contradiction(i64),

    #[error("{0} is not available offline")]
    Unavailable(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("checksum mismatch for fixture {0}")]
    Checksum(String),

    #[error("network: {0}")]
    Network(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
