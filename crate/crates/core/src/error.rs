use thiserror::Error;

/// Errors raised by constructions and checkers.
///
/// `Structural` and `Parse` are input errors (malformed data). `Precondition`
/// means the input is well formed but violates a mathematical hypothesis of
/// the construction; the message names the offending witness.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("structural error: {0}")]
    Structural(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("size cap exceeded: {what} has {size}, cap is {cap}")]
    CapExceeded { what: String, size: usize, cap: usize },
}

impl Error {
    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// True for errors caused by malformed input rather than a failed hypothesis.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Structural(_) | Error::Parse(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
