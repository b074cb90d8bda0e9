use thiserror::Error;

/// Errors surfaced by the library. `Validation`-class errors map to CLI exit
/// code 2, `Capability` to exit code 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid argument: {0}")]
    Validation(String),
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("matrix is not Hermitian within tolerance (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("operation exceeds desk-scale capability: {0}")]
    Capability(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code the CLI uses for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Capability(_) => 3,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}
