use thiserror::Error;

/// Errors raised by the solver, its samplers and the experiment harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("monomial of degree {found} exceeds declared degree {declared} in polynomial {poly}")]
    DegreeViolation {
        poly: usize,
        declared: u32,
        found: u32,
    },
    #[error("zero lies at infinity (|x0| = {0:e} below chart threshold)")]
    ZeroAtInfinity(f64),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("singular jacobian (sigma_min/sigma_max = {0:e})")]
    SingularJacobian(f64),
    #[error("degenerate path: {0}")]
    DegeneratePath(String),
    #[error("too many zeros to enumerate: {count} exceeds cap {cap}")]
    TooManyZeros { count: u128, cap: usize },
    #[error("ill-posed instance: {0}")]
    IllPosed(String),
    #[error("experiment invalid: {0}")]
    ExperimentInvalid(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
