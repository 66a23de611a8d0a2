use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("instance too large for exact computation: {0}")]
    TooLarge(String),

    /// An answer was requested from an oracle in plan-then-answer mode
    /// without going through a sealed plan.
    #[error("adaptive query: oracle answers are only released through a sealed plan")]
    AdaptiveQuery,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("certification failed after {attempts} attempts: {reason}")]
    CertificationFailed { attempts: usize, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
