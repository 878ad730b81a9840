use boombust_core::rng::substream;
use boombust_core::stats::quantile_sorted;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{CpmConfig, TailInfo, ThresholdTable};
use crate::kernel::{d_max, KernelScratch};
use crate::CpmError;

/// Result of the slow-growth least-squares fit `h_t ~ a + b sqrt(ln ln t)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TailFit {
    pub a: f64,
    pub b: f64,
    pub fit_from: u32,
}

fn tail_basis(t: f64) -> f64 {
    (t.ln().ln()).sqrt()
}

/// Calibrate per-`t` thresholds so the conditional false-alarm probability
/// is `alpha = 1 / arl0` at every monitored step.
///
/// Simulation runs on sequential ranks: under a continuous i.i.d. null the
/// statistic depends on the data only through arrival ranks, and each new
/// observation inserts uniformly among its predecessors, so no values are
/// drawn and the calibration is distribution-free. At each step the
/// `(1 - alpha)` quantile of the surviving population is recorded and
/// exceeding streams are replaced by clones of surviving streams, which keeps
/// the population distributed as the null conditional on no prior alarm.
/// Quantiles are exact up to `exact_until`; beyond it the threshold follows a
/// `a + b sqrt(ln ln t)` growth law fitted to the calibrated range.
///
/// Deterministic given `seed`; independent of worker-thread count.
pub fn mc_thresholds(
    config: &CpmConfig,
    reps: u32,
    seed: u64,
    horizon: u32,
) -> Result<ThresholdTable, CpmError> {
    let exact = default_exact_until(config, horizon);
    calibrate(config, reps, seed, horizon, exact, 0.0, String::new())
}

/// Default exactly-calibrated range: enough to cover most null run lengths,
/// capped so calibration stays tractable (the per-step statistic is
/// quadratic in `t`).
pub fn default_exact_until(config: &CpmConfig, horizon: u32) -> u32 {
    horizon.min(config.burn_in + (2 * config.arl0).min(780))
}

/// [`mc_thresholds`] with an explicit tail shift and provenance note
/// (used by the offline generator).
pub fn calibrate_with_note(
    config: &CpmConfig,
    reps: u32,
    seed: u64,
    horizon: u32,
    tail_shift: f64,
    note: String,
) -> Result<ThresholdTable, CpmError> {
    let exact = default_exact_until(config, horizon);
    calibrate(config, reps, seed, horizon, exact, tail_shift, note)
}

/// Rebuild only the extrapolated tail of `table` with a different constant
/// shift; the exactly calibrated range is untouched.
pub fn with_tail_shift(table: &ThresholdTable, shift: f64) -> Result<ThresholdTable, CpmError> {
    let burn = table.burn_in as usize;
    let exact = table.exact_until as usize;
    let mut thresholds = table.thresholds()[..exact - burn].to_vec();
    for t in (exact + 1)..=(table.horizon as usize) {
        thresholds.push(table.tail.a + table.tail.b * tail_basis(t as f64) + shift);
    }
    ThresholdTable::from_parts(
        table.arl0,
        table.burn_in,
        table.horizon,
        thresholds,
        table.reps,
        table.seed,
        table.exact_until,
        TailInfo {
            shift,
            ..table.tail
        },
        table.measured_arl,
        table.note.clone(),
    )
}

pub(crate) fn calibrate(
    config: &CpmConfig,
    reps: u32,
    seed: u64,
    horizon: u32,
    exact_until: u32,
    tail_shift: f64,
    note: String,
) -> Result<ThresholdTable, CpmError> {
    if reps < 1000 {
        return Err(CpmError::TooFewReps(reps));
    }
    let burn = config.burn_in as usize;
    let exact = (exact_until as usize).clamp(burn + 2, horizon as usize);
    let n = reps as usize;
    let alpha = 1.0 / config.arl0 as f64;

    struct Stream {
        arr: Vec<u32>,
        rng: rand_chacha::ChaCha8Rng,
    }
    let mut streams: Vec<Stream> = (0..n)
        .map(|i| Stream {
            arr: Vec::with_capacity(exact),
            rng: substream(seed, i as u64),
        })
        .collect();
    let mut clone_rng = substream(seed, n as u64);

    // Group ends for continuous data: every sorted position is its own group.
    let groups: Vec<u32> = (1..=exact as u32).collect();

    let mut calibrated: Vec<f64> = Vec::with_capacity(exact - burn);
    let mut stats: Vec<f64> = vec![0.0; n];
    let mut sorted: Vec<f64> = vec![0.0; n];

    for t in 1..=exact {
        streams.par_iter_mut().for_each(|s| {
            let pos = s.rng.random_range(0..t);
            s.arr.insert(pos, t as u32);
        });
        if t <= burn {
            continue;
        }
        streams
            .par_iter()
            .map_init(KernelScratch::default, |scratch, s| {
                d_max(&s.arr, &groups[..t], scratch).0
            })
            .collect_into_vec(&mut stats);

        sorted.copy_from_slice(&stats);
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let h = quantile_sorted(&sorted, 1.0 - alpha);
        calibrated.push(h);

        // Replace alarmed streams with clones of surviving ones.
        let killed: Vec<usize> = (0..n).filter(|&i| stats[i] > h).collect();
        if killed.len() == n {
            return Err(CpmError::InvalidTable(
                "calibration degenerated: every stream exceeded the threshold".into(),
            ));
        }
        for &dead in &killed {
            let src = loop {
                let cand = clone_rng.random_range(0..n);
                if stats[cand] <= h {
                    break cand;
                }
            };
            let copy = streams[src].arr.clone();
            streams[dead].arr = copy;
        }
    }

    // Fit the slow-growth tail on the upper part of the calibrated range.
    let fit_from = ((burn + 2).max(exact * 3 / 5)) as u32;
    let fit = fit_tail(&calibrated, config.burn_in, fit_from, exact as u32);

    let mut thresholds = calibrated;
    for t in (exact + 1)..=(horizon as usize) {
        let h = fit.a + fit.b * tail_basis(t as f64) + tail_shift;
        thresholds.push(h);
    }

    ThresholdTable::from_parts(
        config.arl0,
        config.burn_in,
        horizon,
        thresholds,
        reps,
        seed,
        exact as u32,
        TailInfo {
            a: fit.a,
            b: fit.b,
            fit_from: fit.fit_from,
            shift: tail_shift,
        },
        None,
        note,
    )
}

/// Least squares of calibrated `h_t` on `sqrt(ln ln t)` over
/// `t in fit_from..=exact`. Falls back to a flat mean of the last 50 values
/// when the slope comes out negative (the statistic's null quantiles grow).
fn fit_tail(calibrated: &[f64], burn_in: u32, fit_from: u32, exact: u32) -> TailFit {
    let burn = burn_in as usize;
    let lo = (fit_from as usize).max(burn + 1);
    let pairs: Vec<(f64, f64)> = (lo..=exact as usize)
        .map(|t| (tail_basis(t as f64), calibrated[t - burn - 1]))
        .collect();
    let flat = |k: usize| -> TailFit {
        let tail = &calibrated[calibrated.len().saturating_sub(k)..];
        TailFit {
            a: tail.iter().sum::<f64>() / tail.len() as f64,
            b: 0.0,
            fit_from: lo as u32,
        }
    };
    if pairs.len() < 8 {
        return flat(50.min(calibrated.len()));
    }
    let n = pairs.len() as f64;
    let sx: f64 = pairs.iter().map(|p| p.0).sum();
    let sy: f64 = pairs.iter().map(|p| p.1).sum();
    let sxx: f64 = pairs.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pairs.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return flat(50.min(calibrated.len()));
    }
    let b = (n * sxy - sx * sy) / denom;
    if b < 0.0 {
        return flat(50.min(calibrated.len()));
    }
    let a = (sy - b * sx) / n;
    TailFit {
        a,
        b,
        fit_from: lo as u32,
    }
}

/// Estimate the null average run length implied by `table` from simulated
/// rank streams (capped at `cap`). Uses the censoring-aware hazard estimator
/// `ARL = burn_in + total monitored exposure / number of alarms`, which stays
/// unbiased when some streams hit the cap.
pub fn measure_arl_null(table: &ThresholdTable, streams: u32, seed: u64, cap: usize) -> f64 {
    let burn = table.burn_in as usize;
    let cap = cap.min(table.horizon as usize);
    let results: Vec<(u64, bool)> = (0..streams as usize)
        .into_par_iter()
        .map_init(KernelScratch::default, |scratch, i| {
            let mut rng = substream(seed, i as u64);
            let mut arr: Vec<u32> = Vec::with_capacity(cap);
            let mut groups: Vec<u32> = Vec::with_capacity(cap);
            for t in 1..=cap {
                let pos = rng.random_range(0..t);
                arr.insert(pos, t as u32);
                groups.push(t as u32);
                if t <= burn {
                    continue;
                }
                let h = table
                    .threshold(t)
                    .expect("within horizon")
                    .expect("past burn-in");
                let (d, _) = d_max(&arr, &groups[..t], scratch);
                if d > h {
                    return ((t - burn) as u64, true);
                }
            }
            ((cap - burn) as u64, false)
        })
        .collect();
    let exposure: u64 = results.iter().map(|r| r.0).sum();
    let alarms = results.iter().filter(|r| r.1).count();
    if alarms == 0 {
        return f64::INFINITY;
    }
    burn as f64 + exposure as f64 / alarms as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_too_few_reps() {
        let cfg = CpmConfig::new(100, 4).unwrap();
        assert!(matches!(
            mc_thresholds(&cfg, 999, 1, 10_000),
            Err(CpmError::TooFewReps(999))
        ));
    }

    #[test]
    fn thresholds_are_positive_finite_and_deterministic() {
        let cfg = CpmConfig::new(100, 4).unwrap();
        let a = mc_thresholds(&cfg, 1000, 42, 10_000).unwrap();
        let b = mc_thresholds(&cfg, 1000, 42, 10_000).unwrap();
        assert_eq!(a, b);
        assert!(a.thresholds().iter().all(|h| h.is_finite() && *h > 0.0));
        assert_eq!(a.thresholds().len(), 10_000 - 4);
        // The exactly calibrated range is bounded by the internal cap.
        assert_eq!(a.exact_until, 4 + 200);
    }
}
