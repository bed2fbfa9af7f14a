use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid set description: {0}")]
    InvalidSpec(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("no closed form for {0}; use extremal_engine")]
    NoClosedForm(String),
    #[error("boundary singularity at tau = {0}")]
    BoundarySingularity(f64),
    #[error("point outside the domain: {0}")]
    OutOfDomain(String),
    #[error("target count {0} exceeds the resource guard of 10^7 points")]
    ResourceGuard(usize),
    #[error("degenerate set: {0}")]
    Degenerate(String),
    #[error("set appears pluripolar at degree {degree}")]
    Pluripolar { degree: usize },
    #[error("wrong node count: expected {expected}, got {got}")]
    WrongNodeCount { expected: usize, got: usize },
    #[error("cloud too small: {got} points, at least {needed} required")]
    TooFewPoints { needed: usize, got: usize },
    #[error("config/cloud mismatch: {0}")]
    ConfigMismatch(String),
    #[error("no convergence after {iterations} iterations (last update {last_update:e})")]
    NonConvergence { iterations: usize, last_update: f64 },
    #[error("singular Lagrange system")]
    SingularSystem,
    #[error("mixed configurations: {0}")]
    MixedConfigs(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
