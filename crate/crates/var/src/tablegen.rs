//! One-time simulation of the Johansen trace-statistic critical values
//! embedded in `tables/johansen_trace.json` (unrestricted-constant case).

use std::path::Path;

use boombust_core::rng::substream;
use boombust_core::stats::quantile_sorted;
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Result, VarError};
use crate::tables::{TraceCvRow, TraceCvTable, MAX_DIMENSION};

/// One draw from the asymptotic trace distribution with `m` common trends.
///
/// The limit is `tr{ (int F dW')' (int F F')^{-1} (int F dW') }` where `W`
/// is `m`-dimensional standard Brownian motion and `F` is `W` demeaned
/// component by component. Demeaning reflects the unrestricted constant
/// swept out of the estimation; the common trends themselves are simulated
/// driftless, matching the random-walk null the test is pointed at. Both
/// integrals are discretized on `grid` steps with left-endpoint sums.
fn trace_draw(m: usize, grid: usize, rng: &mut impl Rng) -> f64 {
    let scale = 1.0 / (grid as f64).sqrt();
    let mut steps = vec![0.0_f64; grid * m];
    for v in steps.iter_mut() {
        *v = rng.sample::<f64, _>(StandardNormal) * scale;
    }
    // Left-endpoint Brownian paths: w[t] = sum of the first t steps.
    let mut w = vec![0.0_f64; grid * m];
    for j in 0..m {
        let mut acc = 0.0;
        for t in 0..grid {
            w[t * m + j] = acc;
            acc += steps[t * m + j];
        }
    }
    let mut means = vec![0.0_f64; m];
    for t in 0..grid {
        for (j, mean) in means.iter_mut().enumerate() {
            *mean += w[t * m + j];
        }
    }
    for mean in means.iter_mut() {
        *mean /= grid as f64;
    }

    let mut a: DMatrix<f64> = DMatrix::zeros(m, m); // int F dW'
    let mut b: DMatrix<f64> = DMatrix::zeros(m, m); // int F F'
    let mut f = vec![0.0_f64; m];
    for t in 0..grid {
        for j in 0..m {
            f[j] = w[t * m + j] - means[j];
        }
        for i in 0..m {
            for j in 0..m {
                a[(i, j)] += f[i] * steps[t * m + j];
                b[(i, j)] += f[i] * f[j] / grid as f64;
            }
        }
    }
    let chol = b.cholesky().expect("int F F' is positive definite");
    let solved = chol.solve(&a);
    a.iter().zip(solved.iter()).map(|(x, y)| x * y).sum()
}

/// Simulated 90/95/99% quantiles of the trace statistic for `m` common
/// trends. Replications are seeded per index, so results do not depend on
/// the worker count.
pub fn simulate_trace_quantiles(m: usize, reps: u32, grid: usize, seed: u64) -> Result<TraceCvRow> {
    if m == 0 || grid < 50 || reps < 500 {
        return Err(VarError::InvalidParam(format!(
            "trace simulation needs m >= 1, grid >= 50, reps >= 500 (got {m}, {grid}, {reps})"
        )));
    }
    let mut stats: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = substream(seed, ((m as u64) << 32) | u64::from(rep));
            trace_draw(m, grid, &mut rng)
        })
        .collect();
    stats.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(TraceCvRow {
        dim: m,
        q90: quantile_sorted(&stats, 0.90),
        q95: quantile_sorted(&stats, 0.95),
        q99: quantile_sorted(&stats, 0.99),
    })
}

/// Simulate the full table for dimensions `1..=MAX_DIMENSION`.
pub fn build_table(reps: u32, grid: usize, seed: u64) -> Result<TraceCvTable> {
    let rows = (1..=MAX_DIMENSION)
        .map(|m| simulate_trace_quantiles(m, reps, grid, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(TraceCvTable {
        case: "unrestricted constant".to_string(),
        reps,
        grid,
        seed,
        note: format!("gen_johansen_cv --reps {reps} --grid {grid} --seed {seed}"),
        rows,
    })
}

/// Write `johansen_trace.json` into `out_dir`.
pub fn write_tables(out_dir: &Path, reps: u32, grid: usize, seed: u64) -> Result<()> {
    let table = build_table(reps, grid, seed)?;
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join("johansen_trace.json"), table.to_json()? + "\n")?;
    Ok(())
}
