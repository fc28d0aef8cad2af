use thiserror::Error;

/// Errors raised by the solver pipeline.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed embedding: {0}")]
    Structure(String),
    #[error("inconsistent curve: {0}")]
    Curve(String),
    #[error("topology error: {0}")]
    Topology(String),
    #[error("crossing sequence error: {0}")]
    Sequence(String),
    #[error("resource guard exceeded: {0}")]
    Resource(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("contract violated: {0}")]
    Contract(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("internal error (this is a bug): {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
