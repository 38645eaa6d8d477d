use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A configuration value failed validation.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// A conic program was malformed.
    #[error("malformed program: {0}")]
    Program(String),
    /// The conic solver stopped without a usable answer.
    #[error("solver failure: {0}")]
    Solver(String),
    /// Problem size exceeds a combinatorial safety cap.
    #[error("{0}")]
    SizeCap(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
