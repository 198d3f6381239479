use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("invalid word: {0}")]
    InvalidWord(String),
    #[error("generator sign must be +1 or -1, got {0}")]
    InvalidSign(i8),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("not implemented: {0}")]
    Unsupported(String),
}
