use thiserror::Error;

/// Errors produced by the classification and regularization machinery.
#[derive(Debug, Error)]
pub enum RegressError {
    /// Design construction or alignment failure (ragged rows, bad response,
    /// name mismatches between a fit and a test design).
    #[error("invalid design: {0}")]
    InvalidDesign(String),

    /// The response contains a single class, so no slope is identified.
    #[error("response is single-class: {0}")]
    SingleClass(String),

    /// Maximum-likelihood coefficients diverge: some standardized
    /// coefficient passed the divergence bound, the signature of perfectly
    /// separable classes.
    #[error("perfect separation: standardized |beta| exceeded {bound} after {iters} iterations")]
    PerfectSeparation { bound: f64, iters: usize },

    /// The observed information matrix is singular.
    #[error("singular information matrix: {0}")]
    SingularInformation(String),

    /// An iterative fit hit its iteration cap before meeting the tolerance.
    #[error("no convergence after {iters} iterations (criterion {criterion})")]
    NoConvergence { iters: usize, criterion: f64 },

    /// The coordinate-descent objective increased across a sweep, which the
    /// majorization argument forbids; indicates a numerical breakdown.
    #[error("objective increased during sweep {sweep}: {from} -> {to}")]
    NonMonotone { sweep: usize, from: f64, to: f64 },

    /// Invalid tuning input (penalty, mixing weight, grid, or plan).
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// Every cross-validation fold was skipped (single-class training or
    /// evaluation blocks throughout).
    #[error("no usable cross-validation folds: {0}")]
    NoUsableFolds(String),

    #[error(transparent)]
    Core(#[from] boombust_core::CoreError),

    #[error("serialization: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, RegressError>;
