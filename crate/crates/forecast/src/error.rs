use thiserror::Error;

/// Errors surfaced by the forecasting crate.
#[derive(Debug, Error)]
pub enum ForecastError {
    /// A model specification violates one of its invariants.
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    /// Too few observations for the requested model.
    #[error("insufficient sample: need at least {needed} usable observations, got {got}")]
    InsufficientSample { needed: usize, got: usize },

    /// Inputs that must line up (lengths, spans, exogenous columns) do not.
    #[error("misaligned input: {0}")]
    Misaligned(String),

    /// The Kalman recursion produced a non-finite log-likelihood.
    #[error("non-finite likelihood at parameter point: {0}")]
    NonFiniteLikelihood(String),

    /// The optimizer failed to converge for every attempted candidate.
    #[error("no fit converged: {0}")]
    NoConvergedFit(String),

    /// A metric is undefined for the supplied values.
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    /// An invalid argument outside the other categories.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Core(#[from] boombust_core::CoreError),

    #[error(transparent)]
    Unitroot(#[from] boombust_unitroot::UnitrootError),
}

pub type Result<T> = std::result::Result<T, ForecastError>;
