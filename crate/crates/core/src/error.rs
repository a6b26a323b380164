use thiserror::Error;

/// Errors raised by the estimators, the inference layer and the simulators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dataset: {0}")]
    InvalidData(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("coordinate descent did not converge within {iterations} sweeps at lambda = {lambda}")]
    NonConvergence { lambda: f64, iterations: usize },
    #[error("column {0} has zero variance and lambda = 0")]
    ZeroVarianceColumn(usize),
    #[error("degenerate lambda grid: y is orthogonal to every column")]
    DegenerateGrid,
    #[error("no fit on the path satisfies the support cap")]
    NoEligibleFit,
    #[error("nodewise fit for column {0} is not in the target set")]
    IndexMismatch(usize),
    #[error("covariance submatrix is numerically singular (condition number {0:e})")]
    SingularSigma(f64),
    #[error("empty index set")]
    EmptyH,
    #[error("empty support set for the compatibility constant")]
    EmptyS,
    #[error("index {index} out of range for {n} columns")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("lag {lag} too large for {t} observations")]
    LagTooLarge { lag: usize, t: usize },
    #[error("nodewise scale tau^2 = {0:e} is at or below the floor")]
    SingularTau(f64),
    #[error("sandwich variance is numerically singular (condition number {0:e})")]
    SingularPsi(f64),
    #[error("invalid restriction: {0}")]
    InvalidRestriction(String),
    #[error("bad dimension: {0}")]
    BadDimension(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },
}

pub type Result<T> = std::result::Result<T, Error>;
