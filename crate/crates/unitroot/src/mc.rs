//! Monte-Carlo critical values for the ADF/SADF/GSADF/BSADF statistics,
//! simulated under the weak-intercept unit-root null
//!
//! ```text
//! y_t = d·T^{−η} + y_{t−1} + ε_t,   ε_t ~ iid N(0, 1),   y_0 = 0,
//! ```
//!
//! with empirical quantiles taken across replications. One simulation path
//! serves all four statistic kinds, so scan statistics and their critical
//! values always share the same regression code.

use std::fmt;
use std::path::{Path, PathBuf};

use boombust_core::rng::substream;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::adf::AdfSpec;
use crate::error::{Result, UnitrootError};
use crate::scan::{check_window_supports_spec, first_window, scan_sequences};

/// The unit-root null process used for critical-value simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullModel {
    /// Drift scale `d` in `d·T^{−η}`.
    pub drift_scale: f64,
    /// Decay exponent `η`; must exceed 1/2 so the drift vanishes in the
    /// limit distribution.
    pub decay: f64,
    /// Sample size `T`.
    pub t: usize,
}

impl NullModel {
    pub fn new(drift_scale: f64, decay: f64, t: usize) -> Result<Self> {
        if !(decay > 0.5) {
            return Err(UnitrootError::InvalidParam(format!(
                "decay exponent must exceed 1/2, got {decay}"
            )));
        }
        if t < 20 {
            return Err(UnitrootError::InvalidParam(format!("null model needs T >= 20, got {t}")));
        }
        Ok(Self { drift_scale, decay, t })
    }

    /// The weak-intercept null with `d = 1`, `η = 1` used throughout.
    pub fn weak_intercept(t: usize) -> Result<Self> {
        Self::new(1.0, 1.0, t)
    }

    /// Simulate one path of length `T` starting from `y_0 = 0` with unit
    /// innovation variance (the test statistics are scale-invariant).
    pub fn simulate(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let drift = self.drift_scale * (self.t as f64).powf(-self.decay);
        let mut y = Vec::with_capacity(self.t);
        let mut prev = 0.0;
        for _ in 0..self.t {
            prev += drift + rng.sample::<f64, _>(StandardNormal);
            y.push(prev);
        }
        y
    }
}

/// Which statistic a critical-value table calibrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatKind {
    /// Full-sample ADF t-ratio.
    Adf,
    /// Supremum of anchored (`r1 = 0`) ADF statistics.
    Sadf,
    /// Supremum over all `(r1, r2)` windows.
    Gsadf,
    /// The full BSADF sequence: one quantile per window end.
    BsadfSeq,
}

impl StatKind {
    pub fn label(self) -> &'static str {
        match self {
            StatKind::Adf => "adf",
            StatKind::Sadf => "sadf",
            StatKind::Gsadf => "gsadf",
            StatKind::BsadfSeq => "bsadf_seq",
        }
    }
}

impl fmt::Display for StatKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Simulated quantiles: one value per level for scalar statistics, one value
/// per level and window end for the BSADF sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CvValues {
    Scalar(Vec<f64>),
    /// `values[level_index][grid_index]`.
    PerWindow(Vec<Vec<f64>>),
}

/// A simulated critical-value table, reusable across scans with identical
/// sample length, minimal window, and regression specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalValueTable {
    pub kind: StatKind,
    pub t: usize,
    pub r0: f64,
    /// Descriptor of the ADF regression the table was simulated with.
    pub spec_descriptor: String,
    /// Quantile levels, strictly increasing, each in (0, 1).
    pub levels: Vec<f64>,
    pub values: CvValues,
    pub reps: u32,
    pub seed: u64,
}

impl CriticalValueTable {
    /// Structural invariants: enough replications, valid ordered levels, and
    /// values monotone nondecreasing in the quantile level.
    pub fn validate(&self) -> Result<()> {
        if self.reps < 500 {
            return Err(UnitrootError::TooFewReps { got: self.reps });
        }
        if self.levels.is_empty()
            || self.levels.iter().any(|l| !(*l > 0.0 && *l < 1.0))
            || self.levels.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(UnitrootError::InvalidLevels(format!("{:?}", self.levels)));
        }
        let finite_monotone = |rows: &[Vec<f64>]| -> bool {
            rows.iter().all(|r| r.iter().all(|v| v.is_finite()))
                && rows.windows(2).all(|w| w[0].iter().zip(&w[1]).all(|(a, b)| a <= b))
        };
        match &self.values {
            CvValues::Scalar(v) => {
                if v.len() != self.levels.len()
                    || v.iter().any(|x| !x.is_finite())
                    || v.windows(2).any(|w| w[0] > w[1])
                {
                    return Err(UnitrootError::CvMismatch(
                        "scalar values violate level monotonicity".into(),
                    ));
                }
            }
            CvValues::PerWindow(rows) => {
                let grid = self.t - first_window(self.t, self.r0)? + 1;
                if rows.len() != self.levels.len()
                    || rows.iter().any(|r| r.len() != grid)
                    || !finite_monotone(rows)
                {
                    return Err(UnitrootError::CvMismatch(
                        "per-window values violate shape or level monotonicity".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    fn level_index(&self, alpha: f64) -> Result<usize> {
        let quantile = 1.0 - alpha;
        self.levels
            .iter()
            .position(|l| (l - quantile).abs() < 1e-9)
            .ok_or(UnitrootError::LevelUnavailable { alpha, quantile })
    }

    /// Scalar critical value at significance level `alpha` (quantile
    /// `1 − alpha`).
    pub fn scalar_at(&self, alpha: f64) -> Result<f64> {
        match &self.values {
            CvValues::Scalar(v) => Ok(v[self.level_index(alpha)?]),
            CvValues::PerWindow(_) => Err(UnitrootError::CvMismatch(
                "per-window table queried for a scalar critical value".into(),
            )),
        }
    }

    /// Per-window-end critical values at significance level `alpha`.
    pub fn per_window_at(&self, alpha: f64) -> Result<&[f64]> {
        match &self.values {
            CvValues::PerWindow(rows) => Ok(&rows[self.level_index(alpha)?]),
            CvValues::Scalar(_) => Err(UnitrootError::CvMismatch(
                "scalar table queried for per-window critical values".into(),
            )),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let table: Self = serde_json::from_str(json)?;
        table.validate()?;
        Ok(table)
    }

    /// Content-addressed cache filename derived from everything that
    /// identifies the simulation (kind, T, r0, regression, levels, reps,
    /// seed), so distinct configurations can never collide.
    pub fn cache_name(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.kind.label().as_bytes());
        hasher.update(self.t.to_le_bytes());
        hasher.update(self.r0.to_le_bytes());
        hasher.update(self.spec_descriptor.as_bytes());
        for l in &self.levels {
            hasher.update(l.to_le_bytes());
        }
        hasher.update(self.reps.to_le_bytes());
        hasher.update(self.seed.to_le_bytes());
        let digest = hasher.finalize();
        let hex: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
        format!("cv_{}_{hex}.json", self.kind.label())
    }

    /// Write the table under its content-addressed name; returns the path.
    pub fn save_in(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(self.cache_name());
        std::fs::write(&path, self.to_json()?)?;
        Ok(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Simulate a critical-value table for `kind` under the weak-intercept null.
///
/// Deterministic in `seed`: replication `i` draws from an independent RNG
/// substream derived from `(seed, i)`, so the result does not depend on
/// thread count. `levels` are quantile levels in (0, 1), e.g. 0.95 for a 5%
/// right-tail test.
pub fn mc_critical_values(
    kind: StatKind,
    t: usize,
    r0: f64,
    spec: &AdfSpec,
    reps: u32,
    seed: u64,
    levels: &[f64],
) -> Result<CriticalValueTable> {
    if reps < 500 {
        return Err(UnitrootError::TooFewReps { got: reps });
    }
    if levels.is_empty() || levels.iter().any(|l| !(*l > 0.0 && *l < 1.0)) {
        return Err(UnitrootError::InvalidLevels(format!("{levels:?}")));
    }
    let mut levels = levels.to_vec();
    levels.sort_by(f64::total_cmp);
    levels.dedup();

    let w0 = first_window(t, r0)?;
    check_window_supports_spec(w0, spec)?;
    let null = NullModel::weak_intercept(t)?;

    let values = match kind {
        StatKind::Adf => {
            let stats = simulate_scalars(&null, reps, seed, |y| {
                crate::adf::window_stat(y, 0, t, spec).map(|(s, _)| s)
            })?;
            CvValues::Scalar(scalar_quantiles(stats, &levels))
        }
        StatKind::Sadf => {
            let stats = simulate_scalars(&null, reps, seed, |y| {
                let (_, anchored) = scan_sequences(y, w0, spec)?;
                Ok(anchored.into_iter().fold(f64::NEG_INFINITY, f64::max))
            })?;
            CvValues::Scalar(scalar_quantiles(stats, &levels))
        }
        StatKind::Gsadf => {
            let stats = simulate_scalars(&null, reps, seed, |y| {
                let (bsadf, _) = scan_sequences(y, w0, spec)?;
                Ok(bsadf.into_iter().fold(f64::NEG_INFINITY, f64::max))
            })?;
            CvValues::Scalar(scalar_quantiles(stats, &levels))
        }
        StatKind::BsadfSeq => {
            let seqs: Vec<Vec<f64>> = (0..reps)
                .into_par_iter()
                .map(|rep| {
                    let mut rng = substream(seed, rep as u64);
                    let y = null.simulate(&mut rng);
                    scan_sequences(&y, w0, spec).map(|(bsadf, _)| bsadf)
                })
                .collect::<Result<_>>()?;
            let grid = t - w0 + 1;
            let mut rows = vec![vec![0.0; grid]; levels.len()];
            let mut column = vec![0.0; reps as usize];
            for g in 0..grid {
                for (rep, seq) in seqs.iter().enumerate() {
                    column[rep] = seq[g];
                }
                column.sort_by(f64::total_cmp);
                for (li, level) in levels.iter().enumerate() {
                    rows[li][g] = boombust_core::stats::quantile_sorted(&column, *level);
                }
            }
            CvValues::PerWindow(rows)
        }
    };

    let table = CriticalValueTable {
        kind,
        t,
        r0,
        spec_descriptor: spec.descriptor(),
        levels,
        values,
        reps,
        seed,
    };
    table.validate()?;
    Ok(table)
}

fn simulate_scalars<F>(null: &NullModel, reps: u32, seed: u64, stat: F) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = substream(seed, rep as u64);
            let y = null.simulate(&mut rng);
            stat(&y)
        })
        .collect()
}

fn scalar_quantiles(mut stats: Vec<f64>, levels: &[f64]) -> Vec<f64> {
    stats.sort_by(f64::total_cmp);
    levels.iter().map(|l| boombust_core::stats::quantile_sorted(&stats, *l)).collect()
}
