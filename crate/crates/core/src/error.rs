use thiserror::Error;

/// Errors produced by container construction, transforms, and CSV I/O.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid series `{name}`: {reason}")]
    InvalidSeries { name: String, reason: String },

    #[error("malformed date `{0}`: expected YYYY-MM with month in 01..=12")]
    MalformedDate(String),

    #[error("non-numeric cell `{cell}` in column `{column}` at row {row}")]
    NonNumericCell {
        column: String,
        row: usize,
        cell: String,
    },

    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),

    #[error("empty intersection: series share no common months")]
    EmptyIntersection,

    #[error("columns misaligned: {0}")]
    Misaligned(String),

    #[error("missing column `{0}` required by schema")]
    MissingColumn(String),

    #[error("missing cell in column `{column}` at row {row}; gaps are a hard error")]
    MissingCell { column: String, row: usize },

    #[error("non-contiguous dates: expected {expected}, found {found} at row {row}")]
    DateGap {
        expected: String,
        found: String,
        row: usize,
    },

    #[error("transform error: {0}")]
    Transform(String),

    #[error("zero sample variance: {0}")]
    ZeroVariance(String),

    #[error("segment `{label}` has {len} observations; at least {min} required")]
    SegmentTooShort {
        label: String,
        len: usize,
        min: usize,
    },

    #[error("invalid phase labeling: {0}")]
    InvalidLabeling(String),

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
