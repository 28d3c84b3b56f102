use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no unique bisecting hyperplane: the two points coincide")]
    DegenerateBisector,

    #[error(
        "rejection budget exhausted: accepted {accepted} of {requested} after {attempts} draws \
         (acceptance rate ~{acceptance_rate:.3e})"
    )]
    SamplingBudget {
        requested: usize,
        accepted: usize,
        attempts: u64,
        acceptance_rate: f64,
    },

    #[error("no candidate ball found inside the region")]
    NoCandidate,

    #[error("a ball does not fit: {0}")]
    BallDoesNotFit(String),

    #[error("measure hypothesis failed: {0}")]
    MeasureHypothesis(String),

    #[error("metric mismatch: {0} vs {1}")]
    MetricMismatch(String, String),

    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
