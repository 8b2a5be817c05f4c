use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors split into two families: user/input faults (bad files, bad
/// parameters, out-of-scope requests) and internal invariant violations
/// that indicate a bug in this crate. The CLI maps the former to exit
/// code 2 and the latter to exit code 1.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid subset: {0}")]
    InvalidSubset(String),

    #[error("out of range: {0}")]
    Range(String),

    #[error("parity constraint violated: {0}")]
    Parity(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("outside supported scope: {0}")]
    Scope(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("path decomposition invalid: {0}")]
    InvalidDecomposition(String),

    #[error("decomposition unsuitable: {0}")]
    DecompositionUnsuitable(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// True for faults that indicate a bug in this crate rather than bad
    /// input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }
}
