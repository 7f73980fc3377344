use thiserror::Error;

#[derive(Debug, Error)]
pub enum LearnError {
    #[error(transparent)]
    Core(#[from] netrobust_core::Error),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("non-finite gradient in {0}")]
    NonFiniteGradient(&'static str),
    #[error("action {0} is not valid in this state")]
    InvalidAction(usize),
    #[error("empty batch")]
    EmptyBatch,
    #[error("invalid checkpoint: {0}")]
    Checkpoint(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, LearnError>;

impl From<LearnError> for netrobust_core::Error {
    fn from(e: LearnError) -> Self {
        match e {
            LearnError::Core(inner) => inner,
            other => netrobust_core::Error::Policy(other.to_string()),
        }
    }
}
