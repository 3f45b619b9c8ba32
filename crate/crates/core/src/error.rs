use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("window mismatch: [{0}, {1}] vs [{2}, {3}]")]
    WindowMismatch(f64, f64, f64, f64),

    #[error("invalid window [{0}, {1}]: lower bound must be below upper bound")]
    InvalidWindow(f64, f64),

    #[error("invalid set: {0}")]
    InvalidSet(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid Shin-Zettl matrix: {0}")]
    InvalidMatrix(String),

    #[error(
        "RK4 step too coarse: error estimate {estimate:.3e} exceeds {tolerance:.3e} with {substeps} substeps per panel"
    )]
    StepSizeTooCoarse {
        estimate: f64,
        tolerance: f64,
        substeps: usize,
    },

    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    #[error("operator family {0} does not support this operation")]
    UnsupportedFamily(String),

    #[error("operator {0} has only continuous spectrum in the window")]
    ContinuousSpectrumOnly(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("slot {0} carries an absolutely continuous spectral part; only pure-point slots are supported here")]
    SymbolicACUnsupported(String),

    #[error("function is not bounded at lambda = {0}")]
    UnboundedFunction(f64),

    #[error("enumeration budget of {budget} combinations exceeded")]
    EnumerationBudgetExceeded { budget: usize },

    #[error("no closed-form solution basis for slot {0}")]
    UnknownSolutionBasis(String),

    #[error("schema error: {0}")]
    Schema(String),
}
