use thiserror::Error;

/// Errors produced by the VAR, Granger, Johansen, and VECM machinery.
#[derive(Debug, Error)]
pub enum VarError {
    /// A lag order or deterministic-term request outside the supported set.
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    /// Not enough usable observations after lagging.
    #[error("insufficient sample: need at least {needed} usable observations, have {got}")]
    InsufficientSample { needed: usize, got: usize },

    /// A requested column is not in the dataset.
    #[error("unknown column: {0}")]
    UnknownColumn(String),

    /// Cause and effect name the same column.
    #[error("identical columns: cause and effect are both {0}")]
    IdenticalColumns(String),

    /// More variables than the embedded critical values cover.
    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(String),

    /// A cointegration rank outside 1..K-1.
    #[error("invalid rank: {0}")]
    InvalidRank(String),

    /// A singular regressor or moment matrix.
    #[error("singular matrix: {0}")]
    Singular(String),

    /// A residual covariance without a Cholesky factor.
    #[error("not positive definite: {0}")]
    NotPositiveDefinite(String),

    /// An invalid scalar argument (sign, horizon count, step count, ...).
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error(transparent)]
    Core(#[from] boombust_core::CoreError),

    #[error("serialization: {0}")]
    Serde(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, VarError>;
