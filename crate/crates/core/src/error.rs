use thiserror::Error;

/// Errors raised by the library. The CLI maps each kind to an exit code.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Arguments outside an operation's domain (bad urn/tube combination, r ∉ [0,1], ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// Conditioning on a predicate with zero validity.
    #[error("conditioning error: {0}")]
    Conditioning(String),
    /// An enumeration or iteration guard was exceeded.
    #[error("resource error: {0}")]
    Resource(String),
    /// Malformed multiset or distribution text.
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(offset: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            message: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
