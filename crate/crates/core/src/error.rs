use thiserror::Error;

/// Errors surfaced by the toolkit.
///
/// The CLI maps these onto process exit codes: configuration errors exit
/// with 2, numerical failures with 3.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Bad input shape, unknown label, inconsistent spaces, malformed JSON.
    #[error("configuration error: {0}")]
    Config(String),
    /// A value outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// An argument magnitude that would overflow f64 arithmetic.
    #[error("range error: {0}")]
    Range(String),
    /// An iterative kernel failed to converge or produced non-finite values.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// Filesystem problem while emitting results.
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn range(msg: impl Into<String>) -> Self {
        Error::Range(msg.into())
    }
    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
