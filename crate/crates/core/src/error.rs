use thiserror::Error;

/// Errors raised by the library. Every variant maps onto a stable CLI exit code.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid instance: {0}")]
    Validation(String),

    #[error("{what}: size {size} exceeds enumeration bound {bound}")]
    BoundExceeded {
        what: &'static str,
        size: usize,
        bound: usize,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("no witness found at this budget: {0}")]
    NotFound(String),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
