use boombust_changepoint::{builtin_table, monitor, CpmConfig, ThresholdTable};
use boombust_core::TimeSeries;
use boombust_unitroot::{
    exuberance_scan, mc_critical_values, min_window, AdfSpec, CriticalValueTable, StatKind,
};
use serde::{Deserialize, Serialize};

use crate::dgp::PhaseTruth;
use crate::error::Result;

/// Bubble detector under evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Bsadf,
    KsCpm,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Bsadf => "bsadf",
            Self::KsCpm => "ks_cpm",
        }
    }
}

/// Detector configuration for a study run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudySettings {
    /// Exuberance test size for the recursive scan.
    pub bsadf_alpha: f64,
    /// Monte-Carlo replications behind the scan's critical-value sequence.
    pub bsadf_cv_reps: u32,
    /// Seed of the critical-value simulation (independent of the study seed).
    pub bsadf_cv_seed: u64,
    /// In-control average run length of the sequential monitor.
    pub cpm_arl0: u32,
    /// Observations before the first admissible alarm.
    pub cpm_burn_in: u32,
}

impl Default for StudySettings {
    fn default() -> Self {
        Self {
            bsadf_alpha: 0.05,
            bsadf_cv_reps: 2000,
            bsadf_cv_seed: 902_445,
            cpm_arl0: 500,
            cpm_burn_in: 20,
        }
    }
}

/// Prepared per-sample-size detector state: the recursive scan's
/// critical-value sequence and the monitor's threshold table, both reused
/// across every replication of a study.
#[derive(Debug, Clone)]
pub struct DetectorArtifacts {
    pub r0: f64,
    pub spec: AdfSpec,
    pub alpha: f64,
    pub cv: CriticalValueTable,
    pub cpm_config: CpmConfig,
    pub cpm_table: ThresholdTable,
}

impl DetectorArtifacts {
    /// Build both detectors' inputs for paths of length `t`.
    pub fn build(t: usize, settings: &StudySettings) -> Result<Self> {
        let r0 = min_window(t)?;
        let spec = AdfSpec::constant_lag0();
        let cv = mc_critical_values(
            StatKind::BsadfSeq,
            t,
            r0,
            &spec,
            settings.bsadf_cv_reps,
            settings.bsadf_cv_seed,
            &[0.90, 0.95, 0.99],
        )?;
        let cpm_config = CpmConfig::new(settings.cpm_arl0, settings.cpm_burn_in)?;
        let cpm_table = builtin_table(settings.cpm_arl0)?.clone();
        Ok(Self {
            r0,
            spec,
            alpha: settings.bsadf_alpha,
            cv,
            cpm_config,
            cpm_table,
        })
    }
}

/// Map a detector's raw output on one path to three phase marks, or `None`
/// when the path does not yield a usable three-phase report.
///
/// BSADF: the longest exuberant episode (earliest on ties) reported as
/// (origination, in-episode argmax of the statistic, termination).
///
/// KS-CPM: the first three change points of the log-return monitor. A change
/// point after return `tau` means the new regime starts at observation
/// `tau + 1`; the formation and burst marks are the first observations
/// produced by the incoming explosive/collapse regime (`tau + 2`, since the
/// regime's first return ends one observation later), while the decline mark
/// is the last observation of the outgoing collapse regime (`tau + 1`).
///
/// Degenerate reports (too few marks, non-increasing marks, nonpositive
/// prices for the return monitor) map to `None`; genuine detector failures
/// propagate as errors.
pub fn detector_phases(
    method: Method,
    path: &TimeSeries,
    art: &DetectorArtifacts,
) -> Result<Option<PhaseTruth>> {
    match method {
        Method::Bsadf => bsadf_phases(path, art),
        Method::KsCpm => kscpm_phases(path, art),
    }
}

fn bsadf_phases(path: &TimeSeries, art: &DetectorArtifacts) -> Result<Option<PhaseTruth>> {
    let res = exuberance_scan(path, art.r0, &art.spec, &art.cv, art.alpha)?;
    let longest = res
        .episodes
        .iter()
        .max_by(|a, b| (a.end - a.start).cmp(&(b.end - b.start)).then(b.start.cmp(&a.start)));
    Ok(longest.and_then(|ep| PhaseTruth::new(ep.start, ep.peak, ep.end).ok()))
}

fn kscpm_phases(path: &TimeSeries, art: &DetectorArtifacts) -> Result<Option<PhaseTruth>> {
    if path.values().iter().any(|v| *v <= 0.0) {
        return Ok(None);
    }
    let returns: Vec<f64> = path
        .values()
        .windows(2)
        .map(|w| (w[1] / w[0]).ln())
        .collect();
    let seg = monitor(&returns, &art.cpm_config, &art.cpm_table)?;
    if seg.change_points.len() < 3 {
        return Ok(None);
    }
    let taus: Vec<usize> = seg.change_points[..3].iter().map(|cp| cp.tau).collect();
    Ok(PhaseTruth::new(taus[0] + 2, taus[1] + 2, taus[2] + 1).ok())
}
