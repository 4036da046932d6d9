use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside the domain of the requested computation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Exact integer arithmetic left the representable range.
    #[error("integer overflow computing {0}")]
    Overflow(&'static str),

    /// A state violates one of its invariants (normalization, hermiticity,
    /// trace, sector support).
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// A truncated representation cannot certify the requested accuracy.
    #[error("truncation failure: {0}")]
    Truncation(String),

    /// A cascade or state has an inconsistent structure (mode counts,
    /// unreachable outputs, index ranges).
    #[error("structural error: {0}")]
    Structure(String),

    /// A cascade description file failed to parse.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidState(msg.into())
    }

    pub(crate) fn structure(msg: impl Into<String>) -> Self {
        Error::Structure(msg.into())
    }
}
