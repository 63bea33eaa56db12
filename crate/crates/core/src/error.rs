use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("point {x} lies outside the support {lo}..{hi}")]
    DomainError { x: f64, lo: f64, hi: f64 },

    #[error("quadrature failed to converge: value {value:e}, error estimate {err:e} after {intervals} subintervals")]
    QuadratureFailure { value: f64, err: f64, intervals: usize },

    #[error("integrand is not finite at x = {x:e}")]
    NonFiniteIntegrand { x: f64 },

    #[error("iteration did not converge: {0}")]
    ConvergenceFailure(String),

    #[error("drift is not admissible: {0}")]
    AdmissibilityError(String),

    #[error("strict convexity is lost: {0}")]
    ConvexityLost(String),

    #[error("unknown catalog entry `{0}`")]
    CatalogUnknown(String),

    #[error("eigen solve failed: {0}")]
    EigenSolveFailure(String),

    #[error("grid covers only {covered:.3e} of the probability mass (need {required:.3e})")]
    MassDeficit { covered: f64, required: f64 },

    #[error("negative density {value:e} in cell {cell}")]
    StabilityFailure { cell: usize, value: f64 },

    #[error("configuration error: {0}")]
    ConfigError(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("entropy never entered the fitting window [{lo:e}, {hi:e}]")]
    InsufficientDecay { lo: f64, hi: f64 },
}

pub(crate) fn out_of_range(msg: impl Into<String>) -> Error {
    Error::ParameterOutOfRange(msg.into())
}
