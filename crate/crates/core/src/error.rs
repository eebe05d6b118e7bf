use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid exponent p = {0}: need 1 < p < infinity")]
    InvalidExponent(f64),

    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("argument {value} outside the domain {domain}")]
    OutOfDomain { value: f64, domain: &'static str },

    #[error("check requires {requirement}, got p = {p}")]
    InapplicableExponent { p: f64, requirement: &'static str },

    #[error("invalid set: {0}")]
    InvalidSet(String),

    #[error("point is not in the set (violation {violation:e})")]
    NotInSet { violation: f64 },

    #[error("root finding failed after {iterations} iterations (bracket [{lo:e}, {hi:e}], residual {residual:e})")]
    RootFind {
        iterations: usize,
        lo: f64,
        hi: f64,
        residual: f64,
    },

    #[error("halfspaces are not parallel")]
    NonParallel,

    #[error("operator is not monotone: smallest eigenvalue of the symmetric part is {0:e}")]
    NotMonotone(f64),

    #[error("Lyapunov functional increased by {increase:e} at sweep {sweep}; the intersection may be empty")]
    InfeasibleInstance { sweep: usize, increase: f64 },

    #[error(
        "iterate norm {norm:e} exceeded the divergence bound {bound:e} at iteration {iteration}"
    )]
    Divergence {
        iteration: usize,
        norm: f64,
        bound: f64,
    },

    #[error("projection round trip mismatch: {0:e}")]
    RoundTrip(f64),

    #[error("unknown check label `{0}`")]
    UnknownCheck(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
