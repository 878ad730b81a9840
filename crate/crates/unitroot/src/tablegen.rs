//! One-time generator for the embedded ADF and KPSS critical-value tables.
//!
//! Shipped as part of the crate (and exposed through the
//! `gen_unitroot_tables` binary) so the provenance of every embedded
//! constant — null process, seed, replication count — is reproducible from
//! source. Regenerating with the shipped seed reproduces the JSON files
//! byte for byte.

use std::path::Path;

use boombust_core::rng::substream;
use boombust_core::stats::quantile_sorted;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::adf::{AdfSpec, Deterministic, LagRule};
use crate::error::Result;
use crate::kpss::{kpss_statistic, KpssDeterministic};
use crate::mc::NullModel;

/// Sample-size grid the embedded tables cover; lookups outside are clamped.
pub const T_GRID: [usize; 7] = [25, 50, 100, 250, 500, 1000, 2000];

/// Quantile levels stored for the ADF distributions (both tails).
pub const ADF_LEVELS: [f64; 6] = [0.01, 0.05, 0.10, 0.90, 0.95, 0.99];

/// Quantile levels stored for the KPSS distributions (upper tail).
pub const KPSS_LEVELS: [f64; 4] = [0.90, 0.95, 0.975, 0.99];

#[derive(Serialize)]
struct CvFileOut {
    reps: u32,
    seed: u64,
    note: String,
    levels: Vec<f64>,
    t_grid: Vec<usize>,
    values: std::collections::BTreeMap<String, Vec<Vec<f64>>>,
}

/// Simulate one cell: `reps` statistics from independent substreams of
/// `(seed, cell·2^32 + rep)`, reduced to the requested quantiles.
fn cell<F>(reps: u32, seed: u64, cell_idx: u64, levels: &[f64], stat: F) -> Result<Vec<f64>>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Result<f64> + Sync,
{
    let mut stats: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = substream(seed, (cell_idx << 32) | rep as u64);
            stat(&mut rng)
        })
        .collect::<Result<_>>()?;
    stats.sort_by(f64::total_cmp);
    Ok(levels.iter().map(|l| quantile_sorted(&stats, *l)).collect())
}

/// Generate the ADF table: full-sample t-ratios with zero augmentation lags
/// under the weak-intercept unit-root null, for every deterministic case.
pub fn adf_table(reps: u32, seed: u64) -> Result<serde_json::Value> {
    let dets =
        [Deterministic::None, Deterministic::Constant, Deterministic::ConstantTrend];
    let mut values = std::collections::BTreeMap::new();
    for (di, det) in dets.iter().enumerate() {
        let spec = AdfSpec::new(*det, LagRule::Fixed(0));
        let mut rows = Vec::with_capacity(T_GRID.len());
        for (ti, t) in T_GRID.iter().enumerate() {
            let null = NullModel::weak_intercept(*t)?;
            let idx = (di * T_GRID.len() + ti) as u64;
            rows.push(cell(reps, seed, idx, &ADF_LEVELS, |rng| {
                let y = null.simulate(rng);
                crate::adf::window_stat(&y, 0, y.len(), &spec).map(|(s, _)| s)
            })?);
        }
        values.insert(det.label().to_string(), rows);
    }
    let out = CvFileOut {
        reps,
        seed,
        note: "finite-sample ADF t-ratio quantiles; null y_t = T^-1 + y_{t-1} + e_t, \
               e_t ~ iid N(0,1), y_0 = 0; lag 0; quantiles per deterministic case and T"
            .into(),
        levels: ADF_LEVELS.to_vec(),
        t_grid: T_GRID.to_vec(),
        values,
    };
    Ok(serde_json::to_value(&out)?)
}

/// Generate the KPSS table: statistics on iid Gaussian noise (the stationary
/// null) for the level and trend cases.
pub fn kpss_table(reps: u32, seed: u64) -> Result<serde_json::Value> {
    let cases = [KpssDeterministic::Level, KpssDeterministic::Trend];
    let mut values = std::collections::BTreeMap::new();
    for (ci, case) in cases.iter().enumerate() {
        let mut rows = Vec::with_capacity(T_GRID.len());
        for (ti, t) in T_GRID.iter().enumerate() {
            let idx = (100 + ci * T_GRID.len() + ti) as u64;
            rows.push(cell(reps, seed, idx, &KPSS_LEVELS, |rng| {
                let y: Vec<f64> =
                    (0..*t).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                kpss_statistic(&y, *case).map(|(s, _)| s)
            })?);
        }
        values.insert(case.label().to_string(), rows);
    }
    let out = CvFileOut {
        reps,
        seed,
        note: "finite-sample KPSS quantiles; null y_t ~ iid N(0,1); Bartlett long-run \
               variance with bandwidth floor(4*(T/100)^(1/4)); quantiles per case and T"
            .into(),
        levels: KPSS_LEVELS.to_vec(),
        t_grid: T_GRID.to_vec(),
        values,
    };
    Ok(serde_json::to_value(&out)?)
}

/// Write both embedded tables under `dir` as `adf_cv.json` / `kpss_cv.json`.
pub fn write_tables(dir: &Path, reps: u32, seed: u64) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let adf = adf_table(reps, seed)?;
    std::fs::write(dir.join("adf_cv.json"), serde_json::to_string_pretty(&adf)?)?;
    let kpss = kpss_table(reps, seed)?;
    std::fs::write(dir.join("kpss_cv.json"), serde_json::to_string_pretty(&kpss)?)?;
    Ok(())
}
