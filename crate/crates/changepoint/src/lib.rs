//! Nonparametric change-point detection for return series.
//!
//! The statistic is the two-sample Kolmogorov-Smirnov distance: a sequence is
//! split at every admissible point `k`, the KS distance between the two sides
//! is standardized by `sqrt(k (t - k) / t)`, and the maximum over `k` is the
//! monitoring statistic `D_t`. Three entry points build on it:
//!
//! * [`batch_detect`] — retrospective single-change test with a permutation
//!   Monte-Carlo reference distribution;
//! * [`monitor`] — sequential detection with per-`t` thresholds calibrated so
//!   the conditional false-alarm probability is constant (`1 / arl0`) at
//!   every step, restarting after each detection to find multiple changes;
//! * [`segment_returns`] — runs the monitor on log-returns of a price series
//!   and maps detections back to calendar months.
//!
//! Thresholds for the supported `arl0` grid ship precomputed (see
//! [`builtin_table`]); [`mc_thresholds`] recalibrates them from scratch.

mod batch;
mod builtin;
mod calibrate;
mod config;
mod kernel;
mod monitor;

pub use batch::{batch_detect, BatchDetection};
pub use builtin::builtin_table;
pub use calibrate::{
    calibrate_with_note, mc_thresholds, measure_arl_null, with_tail_shift, TailFit,
};
pub use config::{CpmConfig, Statistic, ThresholdTable};
pub use kernel::{ks_two_sample, max_split_stat};
pub use monitor::{
    monitor, segment_returns, ChangePoint, Monitor, SegmentSummary, Segmentation,
};

use thiserror::Error;

/// Errors raised by detection, calibration, and monitoring.
#[derive(Debug, Error)]
pub enum CpmError {
    #[error("empty sample passed to a two-sample statistic")]
    EmptySample,

    #[error("sequence of length {0} is too short; need at least {1}")]
    TooShort(usize, usize),

    #[error("arl0 {0} is not in the supported grid {{100, 500, 1000, 5000}}")]
    UnsupportedArl0(u32),

    #[error("burn_in {0} is below the minimum of 4")]
    BurnInTooSmall(u32),

    #[error("threshold horizon {horizon} exhausted at t = {t}")]
    HorizonExhausted { t: usize, horizon: u32 },

    #[error("table (arl0 {table_arl0}, burn_in {table_burn}) does not match config (arl0 {cfg_arl0}, burn_in {cfg_burn})")]
    TableMismatch {
        table_arl0: u32,
        table_burn: u32,
        cfg_arl0: u32,
        cfg_burn: u32,
    },

    #[error("invalid threshold table: {0}")]
    InvalidTable(String),

    #[error("calibration needs reps >= 1000, got {0}")]
    TooFewReps(u32),

    #[error("sequence length {0} exceeds the supported maximum {1}")]
    TooLong(usize, usize),

    #[error(transparent)]
    Core(#[from] boombust_core::CoreError),

    #[error("table deserialization failed: {0}")]
    Serde(#[from] serde_json::Error),
}
