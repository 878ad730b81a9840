use boombust_core::rng::substream;
use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detect::{detector_phases, DetectorArtifacts, Method, StudySettings};
use crate::dgp::{simulate_path, CollapsePattern, DgpConfig, PhaseTruth};
use crate::error::{Result, SimError};

/// Evaluation window: a replication is correct iff a report exists and every
/// phase mark is within `w` observations of the truth.
pub fn score(reported: Option<&PhaseTruth>, truth: &PhaseTruth, w: usize) -> bool {
    let Some(rep) = reported else {
        return false;
    };
    rep.as_array()
        .iter()
        .zip(truth.as_array())
        .all(|(&est, act)| (est as i64 - act as i64).unsigned_abs() <= w as u64)
}

/// Root-mean-squared phase error over the correct replications:
/// `√((1/3n) Σ_i Σ_j (X̂_ij − X_ij)²)` across the three phases of `n`
/// (reported, truth) pairs.
pub fn phase_rmse(pairs: &[(PhaseTruth, PhaseTruth)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(SimError::EmptyRmse);
    }
    let mut sum = 0.0;
    for (rep, truth) in pairs {
        for (&est, act) in rep.as_array().iter().zip(truth.as_array()) {
            sum += (est as f64 - act as f64).powi(2);
        }
    }
    Ok((sum / (3.0 * pairs.len() as f64)).sqrt())
}

/// Outcome of one detector on one simulated path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepRecord {
    pub rep: u32,
    /// Seed of the replication's path.
    pub path_seed: u64,
    pub truth: PhaseTruth,
    pub reported: Option<PhaseTruth>,
    pub correct: bool,
}

/// Aggregated detector performance on one pattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub pattern: String,
    pub method: Method,
    pub reps: u32,
    pub w: usize,
    /// Master seed of the study.
    pub seed: u64,
    /// Fraction of replications scored correct.
    pub correctness: f64,
    /// Phase RMSE over the correct replications; `None` when none are.
    pub rmse: Option<f64>,
    pub records: Vec<RepRecord>,
}

impl EvalResult {
    /// Aggregate per-replication records; order of `records` is preserved
    /// and does not affect the aggregates.
    pub fn from_records(
        pattern: &str,
        method: Method,
        w: usize,
        seed: u64,
        records: Vec<RepRecord>,
    ) -> Self {
        let n_correct = records.iter().filter(|r| r.correct).count();
        let correctness = if records.is_empty() {
            0.0
        } else {
            n_correct as f64 / records.len() as f64
        };
        let pairs: Vec<(PhaseTruth, PhaseTruth)> = records
            .iter()
            .filter(|r| r.correct)
            .filter_map(|r| r.reported.map(|rep| (rep, r.truth)))
            .collect();
        let rmse = phase_rmse(&pairs).ok();
        Self {
            pattern: pattern.to_string(),
            method,
            reps: records.len() as u32,
            w,
            seed,
            correctness,
            rmse,
            records,
        }
    }
}

fn rep_seed(master: u64, pattern_idx: usize, rep: u32) -> u64 {
    substream(master, ((pattern_idx as u64) << 32) | u64::from(rep)).next_u64()
}

/// Run both detectors over `reps` simulated paths per configuration.
///
/// Replications execute in parallel on per-replication substreams of `seed`;
/// results are byte-identical for any worker count. Returns two rows per
/// configuration, BSADF first, in input order.
pub fn mc_study_configs(
    configs: &[DgpConfig],
    reps: u32,
    seed: u64,
    w: usize,
    settings: &StudySettings,
) -> Result<Vec<EvalResult>> {
    if reps < 100 {
        return Err(SimError::TooFewReps(reps));
    }
    if w == 0 {
        return Err(SimError::InvalidConfig("need w >= 1".into()));
    }
    let mut artifacts: Vec<(usize, DetectorArtifacts)> = Vec::new();
    for cfg in configs {
        cfg.validate()?;
        if cfg.truth().is_none() {
            return Err(SimError::InvalidConfig(
                "study configurations need planted explosion/collapse windows".into(),
            ));
        }
        if !artifacts.iter().any(|(t, _)| *t == cfg.t) {
            artifacts.push((cfg.t, DetectorArtifacts::build(cfg.t, settings)?));
        }
    }
    let mut out = Vec::with_capacity(configs.len() * 2);
    for (p_idx, cfg) in configs.iter().enumerate() {
        let art = &artifacts
            .iter()
            .find(|(t, _)| *t == cfg.t)
            .expect("artifact built above")
            .1;
        let truth = cfg.truth().expect("validated above");
        let per_rep: Vec<(RepRecord, RepRecord)> = (0..reps)
            .into_par_iter()
            .map(|r| -> Result<(RepRecord, RepRecord)> {
                let mut rep_cfg = *cfg;
                rep_cfg.seed = rep_seed(seed, p_idx, r);
                let (path, _) = simulate_path(&rep_cfg)?;
                let record = |method: Method| -> Result<RepRecord> {
                    let reported = detector_phases(method, &path, art)?;
                    Ok(RepRecord {
                        rep: r,
                        path_seed: rep_cfg.seed,
                        truth,
                        reported,
                        correct: score(reported.as_ref(), &truth, w),
                    })
                };
                Ok((record(Method::Bsadf)?, record(Method::KsCpm)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let (bsadf, kscpm): (Vec<RepRecord>, Vec<RepRecord>) = per_rep.into_iter().unzip();
        let label = cfg.pattern.label();
        out.push(EvalResult::from_records(label, Method::Bsadf, w, seed, bsadf));
        out.push(EvalResult::from_records(label, Method::KsCpm, w, seed, kscpm));
    }
    Ok(out)
}

/// Run the study on the canonical configuration of each pattern.
pub fn mc_study(
    patterns: &[CollapsePattern],
    reps: u32,
    seed: u64,
    w: usize,
    settings: &StudySettings,
) -> Result<Vec<EvalResult>> {
    let configs: Vec<DgpConfig> = patterns
        .iter()
        .map(|p| DgpConfig::default_for(*p, 0))
        .collect();
    mc_study_configs(&configs, reps, seed, w, settings)
}

/// CSV header for [`study_csv`].
pub fn study_csv_header() -> String {
    [
        "pattern",
        "method",
        "reps",
        "correctness",
        "rmse",
        "w",
        "seed",
        "t",
        "y0",
        "a",
        "eta",
        "c1",
        "alpha_x",
        "c2",
        "beta_x",
        "b_start",
        "b_end",
        "c_start",
        "c_end",
        "egarch_omega",
        "egarch_alpha",
        "egarch_gamma",
        "egarch_beta",
    ]
    .join(",")
}

/// One CSV row per result, echoing the generating configuration. `configs`
/// must be the study's configurations in input order (two result rows each).
pub fn study_csv(results: &[EvalResult], configs: &[DgpConfig]) -> Result<Vec<String>> {
    if results.len() != configs.len() * 2 {
        return Err(SimError::InvalidConfig(format!(
            "{} results do not pair with {} configurations",
            results.len(),
            configs.len()
        )));
    }
    Ok(results
        .iter()
        .enumerate()
        .map(|(i, res)| {
            let cfg = &configs[i / 2];
            let rmse = res.rmse.map_or(String::new(), |v| v.to_string());
            format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                res.pattern,
                res.method.label(),
                res.reps,
                res.correctness,
                rmse,
                res.w,
                res.seed,
                cfg.t,
                cfg.y0,
                cfg.a,
                cfg.eta,
                cfg.c1,
                cfg.alpha_x,
                cfg.c2,
                cfg.beta_x,
                cfg.b.start,
                cfg.b.end,
                cfg.c.start,
                cfg.c.end,
                cfg.egarch.omega,
                cfg.egarch.alpha,
                cfg.egarch.gamma,
                cfg.egarch.beta
            )
        })
        .collect())
}
