use thiserror::Error;

/// Errors raised by the simulation and study harness.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid EGARCH parameters: {0}")]
    InvalidEgarch(String),
    #[error("invalid DGP configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid phase marks: {0}")]
    InvalidPhases(String),
    #[error("phase RMSE needs at least one correct record")]
    EmptyRmse,
    #[error("study needs at least 100 replications, got {0}")]
    TooFewReps(u32),
    #[error(transparent)]
    Core(#[from] boombust_core::CoreError),
    #[error(transparent)]
    Unitroot(#[from] boombust_unitroot::UnitrootError),
    #[error(transparent)]
    Changepoint(#[from] boombust_changepoint::CpmError),
}

pub type Result<T> = std::result::Result<T, SimError>;
