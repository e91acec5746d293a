use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The caller passed a value outside the operation's domain.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// The request is well-formed but exceeds a configured size cap.
    #[error("capability exceeded: {0}")]
    Capability(String),
    /// An internal invariant failed; indicates a bug or violated hypothesis.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}

pub(crate) fn cap_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Capability(msg.into()))
}
