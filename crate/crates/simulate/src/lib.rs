//! Bubble-path simulation and detector evaluation.
//!
//! The data-generating process splices three regimes into one level series:
//! a drifted random walk, an explosive window `B` with autoregressive root
//! `δ_T = 1 + c1·T^(−α) > 1`, and a collapse window `C` immediately after it
//! with root `γ_T = 1 − c2·T^(−β) < 1`, all driven by EGARCH(1,1)
//! innovations so volatility clusters and reacts asymmetrically to shocks.
//! Three canonical collapse patterns (sudden, disturbing, smooth) differ in
//! how violently and over how many observations the level contracts.
//!
//! The study harness simulates paths with known phase marks (formation
//! start, burst, decline end), asks two detectors to recover them — the
//! recursive right-tailed unit-root scan and the sequential
//! Kolmogorov–Smirnov change-point monitor on log-returns — and aggregates
//! correctness (all three marks within a window `w`) and phase RMSE over
//! the correct replications.

mod detect;
mod dgp;
mod egarch;
mod error;
mod study;

pub use detect::{detector_phases, DetectorArtifacts, Method, StudySettings};
pub use dgp::{simulate_path, CollapsePattern, DgpConfig, PhaseTruth, Window};
pub use egarch::{egarch_path, EgarchParams};
pub use error::{Result, SimError};
pub use study::{
    mc_study, mc_study_configs, phase_rmse, score, study_csv, study_csv_header, EvalResult,
    RepRecord,
};
