use thiserror::Error;

/// Errors raised by the engine. `is_consistency` distinguishes internal
/// consistency failures from configuration and input problems.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("spec error: {0}")]
    Spec(String),
    #[error("structure error: {0}")]
    Structure(String),
    #[error("model error: {0}")]
    Model(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("inversion error: {0}")]
    Inversion(String),
    #[error("location error: {0}")]
    Location(String),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("integrity error: {0}")]
    Integrity(String),
}

impl Error {
    pub fn is_consistency(&self) -> bool {
        matches!(self, Error::Consistency(_) | Error::Integrity(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
