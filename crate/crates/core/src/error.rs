use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    Dimension { expected: usize, found: usize },

    #[error("carrier mismatch: {0}")]
    CarrierMismatch(String),

    #[error("invalid state space: {0}")]
    InvalidSpace(String),

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("invalid probability measure: {0}")]
    InvalidMeasure(String),

    #[error("{what} exceeds capacity {cap} (raise the cap or use Monte-Carlo mode)")]
    Capacity { what: String, cap: usize },

    #[error("ambiguous cocycle: {left} = {right}·h has several solutions h in {candidates:?}")]
    Ambiguity {
        left: String,
        right: String,
        candidates: Vec<String>,
    },

    #[error("multiple stationary vectors: recurrent state classes {classes:?}")]
    Multiplicity { classes: Vec<Vec<String>> },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

impl Error {
    /// Process exit code: 1 for usage/parse problems, 2 for capacity or
    /// unsupported-case failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Capacity { .. }
            | Error::Unsupported(_)
            | Error::Multiplicity { .. }
            | Error::Ambiguity { .. }
            | Error::Inconsistency(_) => 2,
            _ => 1,
        }
    }
}
