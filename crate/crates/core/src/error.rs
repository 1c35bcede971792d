use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum QbcError {
    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    /// A named invariant of a domain object was violated by the input.
    #[error("invariant `{name}` violated: {detail}")]
    Invariant { name: &'static str, detail: String },

    #[error("bad subsystem selection: {0}")]
    Subsystem(String),

    #[error("explicit dimension {dim} exceeds cap {cap}")]
    CapExceeded { dim: usize, cap: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),

    #[error("protocol order violation: {0}")]
    Order(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl QbcError {
    pub(crate) fn invariant(name: &'static str, detail: impl Into<String>) -> Self {
        QbcError::Invariant { name, detail: detail.into() }
    }
}

pub type Result<T> = std::result::Result<T, QbcError>;
