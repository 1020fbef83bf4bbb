use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported expression: {0}")]
    Unsupported(String),
    #[error("field too small: {0}")]
    FieldTooSmall(String),
    #[error("invalid extension class: {0}")]
    InvalidExtension(String),
    #[error("classification error: {0}")]
    Classification(String),
    #[error("genericity search exhausted after {attempts} attempts; last failed predicate: {predicate}")]
    Genericity { attempts: u32, predicate: String },
    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
