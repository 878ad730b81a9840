//! Unit-root and exuberance testing.
//!
//! This crate provides the stationarity diagnostics (ADF, KPSS,
//! Breusch-Pagan) and the recursive right-tail machinery for detecting
//! explosive episodes in a time series: the SADF/GSADF statistics, the
//! BSADF sequence with first-crossing date-stamping, and Monte-Carlo
//! critical values simulated under a weak-intercept unit-root null.
//!
//! The date-stamping convention: an episode starts at the first window end
//! whose BSADF statistic crosses above its critical value and ends at the
//! first window end back below it, with the peak taken at the statistic's
//! argmax in between.

mod adf;
mod bp;
mod error;
mod kpss;
mod mc;
mod scan;
pub mod tablegen;
mod tables;

pub use adf::{adf_test, default_kmax, AdfSpec, AdfTest, Deterministic, LagRule};
pub use bp::{breusch_pagan, BreuschPagan};
pub use error::{Result, UnitrootError};
pub use kpss::{kpss_test, KpssDeterministic, KpssTest};
pub use mc::{mc_critical_values, CriticalValueTable, CvValues, NullModel, StatKind};
pub use scan::{exuberance_scan, min_window, Episode, ExuberanceResult};
pub use tables::embedded_provenance;
