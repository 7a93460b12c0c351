use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReactError {
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("degenerate variance: {0}")]
    DegenerateVariance(String),
    #[error("level must lie in (0, 1), got {0}")]
    InvalidLevel(f64),
    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("grid is empty")]
    EmptyGrid,
    #[error("grid must contain points both inside the hypothesis and outside it")]
    GridNotStraddling,
    #[error("region has no member points")]
    EmptyRegion,
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("contrast weights are all zero")]
    ZeroContrast,
    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("invalid hypothesis: {0}")]
    InvalidHypothesis(String),
    #[error("delta must be non-negative, got {0}")]
    NegativeDelta(f64),
    #[error("NNT must be positive, got {0}")]
    NonpositiveNnt(f64),
    #[error("no exact decision procedure for {region} region against {hypothesis} hypothesis")]
    UnsupportedPair {
        region: &'static str,
        hypothesis: &'static str,
    },
    #[error("test results were produced from different regions")]
    MixedRegions,
    #[error("sample is empty")]
    EmptySample,
    #[error("need at least {required} posterior draws, got {actual}")]
    TooFewDraws { required: usize, actual: usize },
    #[error("invalid counts: {successes} successes out of {trials} trials")]
    InvalidCounts { successes: u64, trials: u64 },
    #[error("invalid posterior parameters: {0}")]
    InvalidPosterior(String),
    #[error("study '{0}' has an empty arm")]
    EmptyArm(String),
    #[error("invalid study '{id}': {reason}")]
    InvalidStudy { id: String, reason: String },
    #[error("no studies supplied")]
    NoStudies,
    #[error("random-effects pooling needs at least two studies")]
    SingleStudy,
    #[error("need at least {required} replications, got {actual}")]
    TooFewReps { required: usize, actual: usize },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}

pub type Result<T> = std::result::Result<T, ReactError>;
