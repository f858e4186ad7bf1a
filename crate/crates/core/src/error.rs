use thiserror::Error;

/// Errors shared across the toolkit. Numerical estimators report failure
/// through these rather than panicking so callers can fold them into reports.
#[derive(Debug, Error)]
pub enum GmtError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point kind does not match the space: {0}")]
    PointKind(String),

    #[error("unknown label index {0}")]
    UnknownLabel(usize),

    #[error("empty set has no diameter")]
    EmptySet,

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("size function domain violation: {0}")]
    Domain(String),

    #[error("delta {delta} is below the target sampling resolution {resolution}")]
    DeltaBelowResolution { delta: f64, resolution: f64 },

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, GmtError>;
