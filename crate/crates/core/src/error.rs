use thiserror::Error;

/// Errors raised by the numeric kernels, the quadrature engine and the drivers
/// built on top of them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid precision context: {0}")]
    InvalidPrecision(String),

    #[error("precision unachievable: {0}")]
    PrecisionUnachievable(String),

    #[error("argument must be positive, got {0}")]
    NonPositiveArgument(String),

    #[error("domain violation in {op}: {detail}")]
    DomainViolation { op: &'static str, detail: String },

    #[error("divergent hypergeometric parameters: {0}")]
    DivergentParameters(String),

    #[error("argument out of range: {0}")]
    ArgumentOutOfRange(String),

    #[error("integrand evaluation failed at x = {at}: {reason}")]
    IntegrandFailure { at: String, reason: String },

    #[error("tail bound violated: |f({at})| = {observed} exceeds certificate {bound}")]
    TailBoundViolation {
        at: String,
        observed: String,
        bound: String,
    },

    #[error("quadrature did not converge after {levels} levels (error estimate {error_estimate})")]
    NonConvergence { levels: u32, error_estimate: String },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("degenerate step size: {0}")]
    DegenerateStep(String),

    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
