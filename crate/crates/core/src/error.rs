use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("row is not admissible (value {value} not divisible by q = {q})")]
    NotAdmissible { value: u128, q: u64 },

    #[error("invalid move: {0}")]
    InvalidMove(String),

    /// An invariant of the enumeration was violated. This is a bug in the
    /// search, never a property of the input.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
