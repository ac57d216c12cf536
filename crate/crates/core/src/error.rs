use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FracError {
    /// A special function was evaluated outside its supported domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// An argument is malformed, such as an off-grid time or mismatched grids.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// A documented precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A Riemann-Liouville derivative was requested at the endpoint where it
    /// diverges because the boundary value is nonzero.
    #[error("operator diverges at t = {t} (boundary value {boundary_value})")]
    Singular { t: f64, boundary_value: f64 },
    /// A window limit was applied to a path violating its hypothesis.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    /// The data model accepts the construct but no evaluation exists for it.
    #[error("not instantiated: {0}")]
    NotInstantiated(String),
    /// A reference integrator failed to produce finite, converged dynamics.
    #[error("integration failed: {0}")]
    Integration(String),
}

pub type Result<T> = std::result::Result<T, FracError>;
