use thiserror::Error;

/// Errors produced by the unit-root and exuberance machinery.
#[derive(Debug, Error)]
pub enum UnitrootError {
    /// A regression (or the scan's smallest window) does not leave enough
    /// usable observations after lagging and differencing.
    #[error("insufficient length: need at least {needed} usable observations, have {got}")]
    InsufficientLength { needed: usize, got: usize },

    /// The regressor matrix is numerically singular on some window.
    #[error("singular regressor matrix: {0}")]
    Singular(String),

    /// Long-run variance collapsed to zero (constant residuals).
    #[error("zero long-run variance: residuals are constant")]
    ZeroLongRunVariance,

    /// Breusch-Pagan received an all-zero residual vector.
    #[error("residuals are identically zero")]
    AllZeroResiduals,

    /// Breusch-Pagan design rows disagree with the residual vector.
    #[error("design mismatch: {0}")]
    DesignMismatch(String),

    /// A quantile level outside (0, 1), or an empty level set.
    #[error("invalid quantile levels: {0}")]
    InvalidLevels(String),

    /// Monte-Carlo replication count below the supported floor.
    #[error("too few replications: got {got}, need at least 500")]
    TooFewReps { got: u32 },

    /// A critical-value table that does not match the requested scan.
    #[error("critical-value table mismatch: {0}")]
    CvMismatch(String),

    /// The requested significance level has no matching quantile in the table.
    #[error("significance level {alpha} not covered by the table (quantile {quantile} missing)")]
    LevelUnavailable { alpha: f64, quantile: f64 },

    /// Invalid scalar parameter (r0, decay exponent, sample size, ...).
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error(transparent)]
    Core(#[from] boombust_core::CoreError),

    #[error("serialization: {0}")]
    Serde(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, UnitrootError>;
