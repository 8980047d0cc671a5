use thiserror::Error;

/// Error type shared by all modules in this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Input size outside the supported range `1..=MAX_N`.
    #[error("input size n = {0} is outside the supported range 1..={max}", max = crate::MAX_N)]
    InputSizeOutOfRange(u32),

    /// A basis label, shift amount, or party input exceeded its bound.
    #[error("{what} = {value} must be less than {bound}")]
    ValueOutOfRange {
        what: &'static str,
        value: u64,
        bound: u64,
    },

    /// Two objects that must share the same input size do not.
    #[error("input size mismatch: {left} vs {right}")]
    SizeMismatch { left: u32, right: u32 },

    /// Amplitude vector length does not match the qudit dimension.
    #[error("amplitude vector has length {len}, expected {expected}")]
    BadAmplitudeCount { len: usize, expected: usize },

    /// State vector norm deviates from 1 by more than the tolerance.
    #[error("state is not normalized: |norm - 1| = {deviation:e}")]
    NotNormalized { deviation: f64 },

    /// A function table violates the augmented-function constraints.
    #[error("invalid function table: {0}")]
    InvalidFunctionTable(String),

    /// A probability argument lies outside its valid interval.
    #[error("{what} = {value} is outside [{lo}, {hi}]")]
    InvalidProbability {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// An efficiency must satisfy 0 < eta <= 1.
    #[error("efficiency eta = {0} is outside (0, 1]")]
    InvalidEfficiency(f64),

    /// A fiber segment table violates its construction constraints.
    #[error("invalid fiber segment table: {0}")]
    InvalidSegmentTable(String),

    /// A photonic configuration violates its constraints.
    #[error("invalid photonic configuration: {0}")]
    InvalidConfig(String),

    /// A Monte Carlo run was requested with zero trials.
    #[error("trial count must be at least 1")]
    ZeroTrials,

    /// An estimator was asked to divide by an empty count.
    #[error("cannot estimate from zero counts: {0}")]
    EmptyCounts(&'static str),

    /// A bundled or external dataset is missing or malformed.
    #[error("dataset error: {0}")]
    Dataset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
