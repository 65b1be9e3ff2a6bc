use thiserror::Error;

/// Failure modes shared by every computation in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// An exact intermediate value does not fit the declared integer width.
    #[error("arithmetic range exceeded: {0}")]
    Overflow(String),

    /// The request would exceed a declared size or memory limit.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// A documented precondition on the arguments does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            Error::Io(e.to_string())
        } else {
            Error::Parse(e.to_string())
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub(crate) fn overflow(what: impl Into<String>) -> Error {
    Error::Overflow(what.into())
}
