use thiserror::Error;

use crate::localsearch::LsResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke an operation's precondition (size mismatch, overlap, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Input values or configuration are outside the supported domain.
    #[error("validation error: {0}")]
    Validation(String),

    /// Malformed instance text.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// Local search took more improving moves than the configured cap.
    #[error("local search exceeded the cap of {max_moves} improving moves")]
    MoveLimit { max_moves: usize, partial: Box<LsResult> },
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
