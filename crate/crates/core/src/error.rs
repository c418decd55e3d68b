use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("orientation error: mean curvature must be positive, got {0}")]
    Orientation(f64),
    #[error("internal consistency error: {0}")]
    InternalConsistency(String),
    #[error("degenerate model: {0}")]
    DegenerateModel(String),
    #[error("operator is not elliptic: {0}")]
    Ellipticity(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("point is not inside the open unit ball (|g| = {0})")]
    BallViolation(f64),
    #[error("weight error: {0}")]
    Weight(String),
    #[error("hypothesis not met: {0}")]
    Hypothesis(String),
    #[error("centering did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
