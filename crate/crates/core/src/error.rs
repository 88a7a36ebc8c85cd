use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("time level {requested} is not available in the history (populated up to {available})")]
    MissingRow { requested: usize, available: usize },

    #[error("cell index {index} is outside the mesh [{min}, {max}]")]
    IndexOutOfMesh { index: i64, min: i64, max: i64 },

    #[error("non-finite value {value} at time level {n}, cell {i}")]
    NonFinite { n: usize, i: i64, value: f64 },

    #[error("quadrature did not converge on [{a}, {b}] (estimated error {estimate:e})")]
    Quadrature { a: f64, b: f64, estimate: f64 },

    #[error("kernel quadrature did not converge: {0}")]
    KernelConvergence(String),

    #[error("source error: {0}")]
    Source(String),

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
