use thiserror::Error;

/// Errors raised by the enumeration and verification routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The field parameters do not describe a finite field.
    #[error("invalid field: {0}")]
    Field(String),
    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A search exceeded its node or time allowance.
    #[error("budget exceeded: {0}")]
    Budget(String),
    /// A consistency check failed; this indicates a bug rather than bad input.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
