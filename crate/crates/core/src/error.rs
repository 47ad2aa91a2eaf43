use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument violates the documented domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Model parameters are invalid or unsupported for the requested quantity.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// The requested argument lies outside the range where the implemented
    /// method is accurate.
    #[error("argument {x} outside the safe range of {what}")]
    OutOfRange { what: &'static str, x: f64 },

    /// Floating-point cancellation makes the result untrustworthy.
    #[error("accuracy loss in {what}: error estimate {estimate:.3e} exceeds {threshold:.1e}")]
    AccuracyLoss {
        what: String,
        estimate: f64,
        threshold: f64,
    },

    /// A coefficient left the finite floating range.
    #[error("coefficient C[{n},{k}] overflowed the floating range")]
    Overflow { n: usize, k: usize },

    /// A configured resource limit was exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// Adaptive quadrature failed to reach its tolerance.
    #[error("quadrature did not converge: estimate {estimate:.17e}, achieved error {achieved:.3e}")]
    NonConvergence { estimate: f64, achieved: f64 },

    /// A simulated trajectory exceeded the runaway guard.
    #[error("runaway trajectory: state exceeded {limit}")]
    Runaway { limit: u64 },

    /// State-space truncation lost too much probability mass.
    #[error("truncation error: boundary mass {mass:.3e} exceeds {limit:.1e}")]
    Truncation { mass: f64, limit: f64 },

    /// Probability conservation drifted during integration.
    #[error("step error: conservation drift {drift:.3e} exceeds {limit:.1e}")]
    StepDrift { drift: f64, limit: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
