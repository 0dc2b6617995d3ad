use thiserror::Error;

/// Errors reported by the geometry routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("coordinate out of range: {0}")]
    InvalidCoordinate(String),

    #[error("not a valid density operator: {0}")]
    InvalidState(String),

    #[error("not a normalized state vector (norm = {0})")]
    NotNormalized(f64),

    #[error("degenerate spectrum at r = 0: the spectral correspondence is not one-to-one")]
    DegenerateSpectrum,

    #[error("metric domain boundary: {0}")]
    MetricBoundary(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("parameter {eta} outside curve validity window ({lo}, {hi})")]
    OutsideWindow { eta: f64, lo: f64, hi: f64 },

    #[error("undefined initial velocity: {0}")]
    InvalidVelocity(String),

    #[error("averaged volume is not positive; entropy undefined")]
    UndefinedEntropy,

    #[error("grid touches a coordinate pole")]
    GridTouchesPole,

    #[error("zero probability component in discrete distribution")]
    ZeroProbability,

    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),

    #[error("tangent plane axis {0} not available on a 2-dimensional metric")]
    PlaneUnavailable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
