use thiserror::Error;

/// Errors raised by construction, reduction, analysis and integration.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("inadmissible weight parameters alpha={alpha}, beta={beta}: both must exceed -1")]
    InvalidWeight { alpha: f64, beta: f64 },

    #[error("degree {degree} exceeds the supported maximum of {cap}")]
    DegreeCap { degree: usize, cap: usize },

    #[error("polynomial index {index} out of range for basis with n_max={n_max}")]
    DegreeOutOfRange { index: usize, n_max: usize },

    #[error("norm of degree-{degree} polynomial under/overflowed ({norm_sq:e})")]
    NormBreakdown { degree: usize, norm_sq: f64 },

    #[error("eigen-solver failed to produce {expected} real nodes")]
    EigenFailure { expected: usize },

    #[error("quadrature node {node} lies outside [0, 1]")]
    NodeOutOfRange { node: f64 },

    #[error("duplicate quadrature nodes at {node}")]
    DuplicateNodes { node: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature weight ({rule}) does not match tableau weight ({tableau})")]
    WeightMismatch { rule: String, tableau: String },

    #[error("weight is singular at {point}; evaluate strictly inside (0, 1)")]
    Domain { point: f64 },

    #[error("stage solver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("non-finite value encountered in stage solve")]
    NonFinite,

    #[error("step {step} failed: {source}")]
    StepFailed {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("step size {h} does not divide the interval [{t0}, {t1}]")]
    StepMismatch { t0: f64, t1: f64, h: f64 },

    #[error("error {error:e} at the largest step is below the solver noise floor {floor:e}")]
    InstrumentationLimit { error: f64, floor: f64 },

    #[error("tableau file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
