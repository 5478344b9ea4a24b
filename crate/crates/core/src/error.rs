use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("singular Jacobian at ({x}, {y})")]
    SingularJacobian { x: f64, y: f64 },
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("no stationary point: {0}")]
    NoStationaryPoint(String),
    #[error("negative radicand {0:e} in phi")]
    NegativeRadicand(f64),
    #[error("no bound state: {0}")]
    NoBoundState(String),
    #[error("grid too small: {0}")]
    GridTooSmall(String),
    #[error("well is not admissible: {0}")]
    NotAdmissible(String),
    #[error("unbound: {0}")]
    Unbound(String),
    #[error("consistency check failed: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
