//! Core containers and utilities for monthly economic time series.
//!
//! This crate provides the shared foundation for the workspace: calendar
//! months, validated series and datasets, CSV ingestion/export, a composable
//! transform pipeline (log, differencing, standardization, lags), descriptive
//! analytics (correlation matrices, phase-conditional kernel densities), a
//! deterministic RNG substream helper, and small numeric building blocks
//! (OLS, quantiles) reused by the statistical crates.

pub mod error;
pub mod linalg;
pub mod month;
pub mod rng;
pub mod series;
pub mod stats;
pub mod transform;

pub mod csvio;

pub use error::CoreError;
pub use month::Month;
pub use series::{Dataset, TimeSeries};
pub use stats::PhaseLabeling;
pub use transform::{TransformSpec, TransformStep};

/// Convenience alias used across the workspace.
pub type Result<T> = std::result::Result<T, CoreError>;
