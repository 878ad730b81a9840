//! Recursive exuberance scan: the BSADF statistic sequence, its SADF/GSADF
//! summaries, and first-crossing date-stamping of explosive episodes.

use boombust_core::TimeSeries;
use serde::{Deserialize, Serialize};

use crate::adf::AdfSpec;
use crate::error::{Result, UnitrootError};
use crate::mc::{CriticalValueTable, StatKind};

/// Minimal window fraction `r0 = 0.01 + 1.8/√T`, clamped from below so the
/// smallest window holds at least ten observations.
pub fn min_window(t: usize) -> Result<f64> {
    if t < 20 {
        return Err(UnitrootError::InvalidParam(format!(
            "minimal-window rule needs T >= 20, got {t}"
        )));
    }
    let base = 0.01 + 1.8 / (t as f64).sqrt();
    Ok(base.max(10.0 / t as f64).min(1.0))
}

/// Observation count of the smallest scan window for a sample of length `t`.
pub(crate) fn first_window(t: usize, r0: f64) -> Result<usize> {
    if !(r0 > 0.0 && r0 <= 1.0) {
        return Err(UnitrootError::InvalidParam(format!("r0 must lie in (0, 1], got {r0}")));
    }
    let w0 = ((r0 * t as f64) + 1e-9).floor() as usize;
    let w0 = w0.max(10);
    if w0 > t {
        return Err(UnitrootError::InsufficientLength { needed: w0, got: t });
    }
    Ok(w0)
}

/// One date-stamped explosive episode, in 0-based observation indexes of the
/// scanned series.
///
/// `start` is the first window end whose BSADF statistic exceeds its critical
/// value, `end` the first subsequent window end back below it (the collapse
/// date); if the sample finishes while still exuberant, `end` is the last
/// observation and the episode is right-censored. `peak` is the argmax of the
/// statistic over the exuberant stretch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Episode {
    pub start: usize,
    pub peak: usize,
    pub end: usize,
}

/// Output of [`exuberance_scan`]: the statistic sequence over window ends,
/// the matching critical values, scalar summaries, and date-stamped episodes.
#[derive(Debug, Clone)]
pub struct ExuberanceResult {
    /// 0-based observation index of each window end (grid point `i` ends at
    /// observation `r2_obs[i]`, i.e. uses observations `0..=r2_obs[i]`).
    pub r2_obs: Vec<usize>,
    /// Backward-sup ADF statistic per grid point.
    pub bsadf: Vec<f64>,
    /// The `r1 = 0` (anchored) ADF statistic per grid point; its running
    /// supremum underlies `sadf`.
    pub sadf_sequence: Vec<f64>,
    /// Critical value per grid point at `alpha`.
    pub cv: Vec<f64>,
    pub sadf: f64,
    pub gsadf: f64,
    pub alpha: f64,
    pub episodes: Vec<Episode>,
}

impl ExuberanceResult {
    /// CSV projection: one row per grid point with the observation index of
    /// the window end, the statistic, the critical value, and an exuberance
    /// flag.
    pub fn csv_header() -> Vec<String> {
        ["r2_obs", "bsadf", "cv", "exuberant"].map(String::from).to_vec()
    }

    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        self.r2_obs
            .iter()
            .zip(self.bsadf.iter().zip(&self.cv))
            .map(|(obs, (stat, cv))| {
                vec![
                    obs.to_string(),
                    format!("{stat}"),
                    format!("{cv}"),
                    usize::from(stat > cv).to_string(),
                ]
            })
            .collect()
    }
}

/// BSADF sequence and anchored (`r1 = 0`) ADF sequence over all window ends
/// `w0..=T`. Shared by the public scan and the Monte-Carlo calibration so
/// observed statistics and simulated null statistics come from one code path.
pub(crate) fn scan_sequences(
    y: &[f64],
    w0: usize,
    spec: &AdfSpec,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let t = y.len();
    debug_assert!(w0 <= t);
    let grid = t - w0 + 1;
    let mut bsadf = Vec::with_capacity(grid);
    let mut anchored = Vec::with_capacity(grid);
    for end in w0..=t {
        let mut sup = f64::NEG_INFINITY;
        let mut at_zero = f64::NEG_INFINITY;
        for r1 in 0..=end - w0 {
            let (stat, _) = crate::adf::window_stat(y, r1, end, spec)?;
            if r1 == 0 {
                at_zero = stat;
            }
            if stat > sup {
                sup = stat;
            }
        }
        bsadf.push(sup);
        anchored.push(at_zero);
    }
    Ok((bsadf, anchored))
}

/// Validate that the scan's smallest window leaves enough usable
/// observations for the regression `spec` implies.
pub(crate) fn check_window_supports_spec(w0: usize, spec: &AdfSpec) -> Result<()> {
    let kmax = spec.lag_rule.max_lag();
    let p = spec.deterministic.count() + 1 + kmax;
    let usable = w0.saturating_sub(1 + kmax);
    if usable < p + 1 {
        return Err(UnitrootError::InsufficientLength { needed: p + 1, got: usable });
    }
    Ok(())
}

/// Recursive exuberance scan with date-stamping.
///
/// `cv` must be a BSADF-sequence table generated for the same sample length,
/// `r0`, and regression specification; `alpha` must be one of the
/// significance levels the table covers.
pub fn exuberance_scan(
    s: &TimeSeries,
    r0: f64,
    spec: &AdfSpec,
    cv: &CriticalValueTable,
    alpha: f64,
) -> Result<ExuberanceResult> {
    let t = s.len();
    if cv.kind != StatKind::BsadfSeq {
        return Err(UnitrootError::CvMismatch(format!(
            "need a bsadf_seq table, got {}",
            cv.kind.label()
        )));
    }
    if cv.t != t {
        return Err(UnitrootError::CvMismatch(format!(
            "table simulated for T = {}, series has T = {t}",
            cv.t
        )));
    }
    if (cv.r0 - r0).abs() > 1e-12 {
        return Err(UnitrootError::CvMismatch(format!(
            "table simulated for r0 = {}, scan requested r0 = {r0}",
            cv.r0
        )));
    }
    if cv.spec_descriptor != spec.descriptor() {
        return Err(UnitrootError::CvMismatch(format!(
            "table simulated for regression '{}', scan requested '{}'",
            cv.spec_descriptor,
            spec.descriptor()
        )));
    }
    let w0 = first_window(t, r0)?;
    check_window_supports_spec(w0, spec)?;
    let cvs = cv.per_window_at(alpha)?;
    let grid = t - w0 + 1;
    if cvs.len() != grid {
        return Err(UnitrootError::CvMismatch(format!(
            "table holds {} grid points, scan produces {grid}",
            cvs.len()
        )));
    }

    let (bsadf, anchored) = scan_sequences(s.values(), w0, spec)?;
    let sadf = anchored.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let gsadf = bsadf.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let episodes = date_stamp(&bsadf, cvs, w0);
    Ok(ExuberanceResult {
        r2_obs: (w0 - 1..t).collect(),
        bsadf,
        sadf_sequence: anchored,
        cv: cvs.to_vec(),
        sadf,
        gsadf,
        alpha,
        episodes,
    })
}

/// First-crossing date-stamping: an episode opens at the first grid point
/// with `bsadf > cv` and closes at the first subsequent grid point with
/// `bsadf < cv` (right-censored at the sample end if no such point exists).
fn date_stamp(bsadf: &[f64], cvs: &[f64], w0: usize) -> Vec<Episode> {
    let obs = |grid_idx: usize| w0 - 1 + grid_idx;
    let mut episodes = Vec::new();
    let mut i = 0;
    while i < bsadf.len() {
        if bsadf[i] > cvs[i] {
            let start = i;
            let mut j = i + 1;
            while j < bsadf.len() && bsadf[j] >= cvs[j] {
                j += 1;
            }
            // Exuberant stretch is [start, j); j is the first point back
            // below the critical value, or one past the end if censored.
            let peak = (start..j)
                .max_by(|a, b| bsadf[*a].total_cmp(&bsadf[*b]))
                .expect("non-empty stretch");
            let end = if j < bsadf.len() { j } else { bsadf.len() - 1 };
            episodes.push(Episode { start: obs(start), peak: obs(peak), end: obs(end) });
            i = j + 1;
        } else {
            i += 1;
        }
    }
    episodes
}
