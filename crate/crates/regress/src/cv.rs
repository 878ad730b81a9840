use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design::Design;
use crate::enet::{enet_path, fit_enet, lambda_max, EnetFit};
use crate::error::{RegressError, Result};

/// Expanding-window cross-validation plan: the first fold trains on the
/// leading `initial` observations, each later fold grows the training window
/// by `horizon`, and every fold is scored on the following `horizon` block
/// (the final block may be shorter).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CvPlan {
    pub initial: usize,
    pub horizon: usize,
    /// Grid size over the mixing weight α.
    pub n_alpha: usize,
    /// Grid size over the penalty λ.
    pub n_lambda: usize,
}

impl CvPlan {
    pub fn new(initial: usize, horizon: usize, n_alpha: usize, n_lambda: usize) -> Result<Self> {
        if initial < 2 || horizon == 0 {
            return Err(RegressError::InvalidParam(format!(
                "need initial ≥ 2 and horizon ≥ 1, got {initial}/{horizon}"
            )));
        }
        if n_alpha == 0 || n_lambda == 0 {
            return Err(RegressError::InvalidParam("empty tuning grid".into()));
        }
        Ok(Self { initial, horizon, n_alpha, n_lambda })
    }

    /// Fold boundaries on a sample of length `n`: (train end, test end)
    /// pairs with train `[0, train_end)` and test `[train_end, test_end)`.
    pub fn folds(&self, n: usize) -> Result<Vec<(usize, usize)>> {
        if self.initial + self.horizon > n {
            return Err(RegressError::InvalidParam(format!(
                "plan needs initial + horizon = {} observations, sample has {n}",
                self.initial + self.horizon
            )));
        }
        let mut folds = Vec::new();
        let mut train_end = self.initial;
        while train_end < n {
            let test_end = (train_end + self.horizon).min(n);
            folds.push((train_end, test_end));
            train_end = test_end;
        }
        Ok(folds)
    }
}

/// One grid point's pooled held-out performance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvCell {
    pub alpha: f64,
    pub lambda: f64,
    /// Mean held-out log-loss over all evaluated observations.
    pub mean_loss: f64,
}

/// The full cross-validation surface plus bookkeeping about skipped folds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvTable {
    pub cells: Vec<CvCell>,
    /// Fold indices skipped because their training window held one class.
    pub skipped_folds: Vec<usize>,
    pub folds_used: usize,
}

impl CvTable {
    /// The minimizing cell (first encountered on ties; cells are ordered by
    /// α ascending, then λ descending, so ties resolve to the sparser fit).
    pub fn best(&self) -> &CvCell {
        self.cells
            .iter()
            .min_by(|a, b| a.mean_loss.partial_cmp(&b.mean_loss).expect("finite losses"))
            .expect("nonempty grid")
    }

    pub fn csv_header() -> String {
        "alpha,lambda,mean_loss".into()
    }

    pub fn csv_rows(&self) -> Vec<String> {
        self.cells
            .iter()
            .map(|c| format!("{},{},{}", c.alpha, c.lambda, c.mean_loss))
            .collect()
    }
}

/// Outcome of expanding-window tuning: the chosen grid point, the refit on
/// the full sample (carrying the CV table), and the table itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvOutcome {
    pub alpha: f64,
    pub lambda: f64,
    pub fit: EnetFit,
    pub table: CvTable,
}

/// Per-observation log-loss with probabilities clamped away from 0/1.
pub fn log_loss(p: f64, y: u8) -> f64 {
    let p = p.clamp(1e-12, 1.0 - 1e-12);
    if y == 1 {
        -p.ln()
    } else {
        -(1.0 - p).ln()
    }
}

fn linspace(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    if k == 1 {
        return vec![hi];
    }
    (0..k)
        .map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64)
        .collect()
}

/// Log-spaced descending grid from `top` to `top / range`.
fn lambda_grid(top: f64, range: f64, k: usize) -> Vec<f64> {
    if k == 1 {
        return vec![top];
    }
    (0..k)
        .map(|i| top * (-(range.ln()) * i as f64 / (k - 1) as f64).exp())
        .collect()
}

/// Tune (α, λ) by expanding-window cross-validation and refit on the full
/// sample.
///
/// The α grid is uniform on [0.05, 1]; each α gets its own log-spaced λ grid
/// from its kill point `λ_max(α)` down three decades. Grids are fixed from
/// the full sample so every fold scores the same candidates; each fold
/// standardizes on its own training window and carries that scaler onto the
/// held-out block. Folds whose training window holds a single class are
/// skipped; it is an error if every fold is skipped.
pub fn cv_tune(d: &Design, plan: &CvPlan) -> Result<CvOutcome> {
    let folds = plan.folds(d.n())?;
    let full_std = d.standardize()?;
    let alphas = linspace(0.05, 1.0, plan.n_alpha);
    let grids: Vec<(f64, Vec<f64>)> = alphas
        .iter()
        .map(|&a| Ok((a, lambda_grid(lambda_max(&full_std, a)?, 1000.0, plan.n_lambda))))
        .collect::<Result<_>>()?;

    // Per fold: total held-out loss per grid point, plus the block size.
    let fold_runs: Vec<Result<Option<(Vec<f64>, usize)>>> = folds
        .par_iter()
        .map(|&(train_end, test_end)| {
            let train = d.slice(0, train_end)?;
            if !train.has_both_classes() {
                return Ok(None);
            }
            let train_std = train.standardize()?;
            let scaler = train_std.scaler().expect("standardized").clone();
            let test = d.slice(train_end, test_end)?;
            let test_std = test.standardize_with(&scaler)?;
            let mut losses = Vec::with_capacity(grids.len() * plan.n_lambda);
            for (alpha, lambdas) in &grids {
                let fits = enet_path(&train_std, *alpha, lambdas)?;
                for fit in &fits {
                    // Predict on the standardized scale of the training
                    // window.
                    let total: f64 = test_std
                        .rows()
                        .iter()
                        .zip(test_std.response())
                        .map(|(row, &y)| {
                            let eta = fit.intercept_std
                                + row
                                    .iter()
                                    .zip(&fit.slopes_std)
                                    .map(|(x, b)| x * b)
                                    .sum::<f64>();
                            log_loss(crate::logit::sigmoid(eta), y)
                        })
                        .sum();
                    losses.push(total);
                }
            }
            Ok(Some((losses, test_end - train_end)))
        })
        .collect();

    let n_cells = grids.len() * plan.n_lambda;
    let mut totals = vec![0.0f64; n_cells];
    let mut n_obs = 0usize;
    let mut skipped = Vec::new();
    let mut used = 0usize;
    for (k, run) in fold_runs.into_iter().enumerate() {
        match run? {
            None => skipped.push(k),
            Some((losses, block)) => {
                for (t, l) in totals.iter_mut().zip(&losses) {
                    *t += l;
                }
                n_obs += block;
                used += 1;
            }
        }
    }
    if used == 0 {
        return Err(RegressError::NoUsableFolds(format!(
            "all {} folds had single-class training windows",
            folds.len()
        )));
    }

    let mut cells = Vec::with_capacity(n_cells);
    for (ai, (alpha, lambdas)) in grids.iter().enumerate() {
        for (li, &lambda) in lambdas.iter().enumerate() {
            cells.push(CvCell {
                alpha: *alpha,
                lambda,
                mean_loss: totals[ai * plan.n_lambda + li] / n_obs as f64,
            });
        }
    }
    let table = CvTable { cells, skipped_folds: skipped, folds_used: used };
    let best = *table.best();
    let mut fit = fit_enet(&full_std, best.alpha, best.lambda)?;
    fit.cv = Some(table.clone());
    Ok(CvOutcome { alpha: best.alpha, lambda: best.lambda, fit, table })
}
