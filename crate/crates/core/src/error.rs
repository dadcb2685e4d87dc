use thiserror::Error;

/// Errors produced by the signal models, estimators and file readers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("value {value} outside of [{low}, {high}]")]
    OutOfRange { value: f64, low: f64, high: f64 },

    #[error("no sample exceeds the support level")]
    EmptySupport,

    #[error("empty input")]
    EmptyInput,

    #[error("diagram has {0} points; at least 2 are needed to place a split")]
    InsufficientStructure(usize),

    #[error("no gap exceeds the split threshold {mu}")]
    NoSplit { mu: f64 },

    #[error("only one gap exceeds the split threshold; the trimmed window has zero length")]
    DegenerateWindow,

    #[error("samples are not uniformly spaced (relative deviation {0:e})")]
    NonUniformSampling(f64),

    #[error("spectrum has no bin above the peak threshold")]
    NoPeak,

    #[error("diagram of {size} points exceeds the exact bottleneck limit of {limit}")]
    DiagramTooLarge { size: usize, limit: usize },

    #[error("point cloud dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("line {line}: time {time} does not increase")]
    NonMonotoneTime { line: u64, time: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures of the estimators themselves (as opposed to bad
    /// input files or parameters).
    pub fn is_estimator_failure(&self) -> bool {
        matches!(
            self,
            Error::EmptySupport
                | Error::InsufficientStructure(_)
                | Error::NoSplit { .. }
                | Error::DegenerateWindow
                | Error::NoPeak
        )
    }
}
