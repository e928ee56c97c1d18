use thiserror::Error;

/// Errors raised anywhere in the measurement pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("row {row}: non-numeric cell `{cell}` in column `{column}`")]
    NonNumericCell { row: usize, column: String, cell: String },
    #[error("row {row}: non-positive value at time {time}")]
    NonPositiveValue { row: usize, time: f64 },
    #[error("duplicate time {0}")]
    DuplicateTime(f64),
    #[error("times must be strictly increasing (at index {0})")]
    NonIncreasingTime(usize),
    #[error("non-finite number at index {0}")]
    NonFinite(usize),
    #[error("insufficient data: need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("insufficient overlap: {common} common times, need at least 4")]
    InsufficientOverlap { common: usize },
    #[error("degenerate sample: zero variance")]
    DegenerateSample,
    #[error("regressor is constant")]
    ConstantRegressor,
    #[error("length mismatch: x has {x}, y has {y}")]
    LengthMismatch { x: usize, y: usize },
    #[error("asymptote {k} does not exceed observed value {value}")]
    KTooSmall { k: f64, value: f64 },
    #[error("logistic search failed: {0}")]
    SearchFailure(String),
    #[error("invalid argument to special function: {0}")]
    Domain(&'static str),
    #[error("continued fraction did not converge in {0} iterations")]
    NoConvergence(usize),
    #[error("generation count must be at least 1, got {0}")]
    InvalidCount(u64),
    #[error("duration must be positive")]
    InvalidDuration,
    #[error("coevolution needs at least 2 technologies, got {0}")]
    TooFewComponents(usize),
    #[error("could not draw a positive noisy value at t = {time} after {attempts} attempts")]
    DegenerateNoise { time: f64, attempts: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// True for failures of the numerical fit rather than of the input data.
    pub fn is_fit_failure(&self) -> bool {
        matches!(self, Error::KTooSmall { .. } | Error::SearchFailure(_) | Error::NoConvergence(_) | Error::Domain(_))
    }
}

pub type Result<R, E = Error> = std::result::Result<R, E>;
