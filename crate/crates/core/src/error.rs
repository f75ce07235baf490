use thiserror::Error;

pub type Result<T> = std::result::Result<T, VtcpError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VtcpError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid tensor: {0}")]
    InvalidTensor(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unknown class `{0}`")]
    UnknownClass(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("no convergence after {iterations} iterations: {reason}")]
    NotConverged { iterations: usize, reason: String },

    #[error("dimension {dim} exceeds the limit of {limit} for exhaustive search")]
    DimensionTooLarge { dim: usize, limit: usize },

    #[error("invalid field `{field}`: {reason}")]
    InvalidField { field: String, reason: String },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unsupported format version `{0}`")]
    FormatVersion(String),

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for VtcpError {
    fn from(e: std::io::Error) -> Self {
        VtcpError::Io(e.to_string())
    }
}

pub(crate) fn check_dims(what: &str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(VtcpError::Dimension(format!(
            "{what}: expected {expected}, got {got}"
        )))
    }
}
