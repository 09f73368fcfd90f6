use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QfaError {
    #[error("index {index} out of range for a group of order {order}")]
    Range { index: u64, order: u64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("group of order {order} exceeds the enumeration cap of {cap} elements")]
    Capacity { order: u128, cap: u64 },
    #[error("{0} is not an odd prime")]
    Prime(u64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("search budget exceeded: {0}")]
    Budget(String),
}

pub type Result<T> = std::result::Result<T, QfaError>;

pub(crate) fn shape(msg: impl Into<String>) -> QfaError {
    QfaError::Shape(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> QfaError {
    QfaError::Invalid(msg.into())
}
