use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix or vector has no entries")]
    Empty,

    #[error("non-finite entry at index {0}")]
    NonFinite(usize),

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid rank tolerance {0}")]
    InvalidTolerance(f64),

    #[error("sample set needs at least one direction")]
    NoDirections,

    #[error("direction {0} is zero")]
    ZeroDirection(usize),

    #[error("sample points {0} and {1} coincide")]
    DuplicatePoints(usize, usize),

    #[error("evaluation table has no reflected values f(x0 - d)")]
    MissingReflected,

    #[error("zero denominator: {0}")]
    ZeroDenominator(&'static str),

    #[error("product rule needs at least 2 factors, got {0}")]
    TooFewFactors(usize),

    #[error("image set is degenerate: {0}")]
    DegenerateImage(String),

    #[error("sample set is rank deficient (undetermined case)")]
    RankDeficient,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("too few usable points for a slope fit: {0} (need at least 4)")]
    TooFewPoints(usize),

    #[error("delta list empty")]
    EmptyDeltas,

    #[error("delta {delta} is not below the ball radius {radius}")]
    DeltaOutsideBall { delta: f64, radius: f64 },

    #[error("deltas must be strictly decreasing")]
    DeltasNotDecreasing,

    #[error("unknown function '{0}'")]
    UnknownFunction(String),

    #[error("malformed sample-set file: {0}")]
    MalformedSampleSet(String),
}
