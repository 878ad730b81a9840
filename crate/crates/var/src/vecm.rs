use boombust_core::linalg::ols_multi;
use boombust_core::Dataset;
use nalgebra::{DMatrix, DVector};

use crate::error::{Result, VarError};
use crate::johansen::reduced_rank;

/// A vector error-correction model fitted by reduced-rank regression.
#[derive(Debug, Clone)]
pub struct VecmFit {
    /// Endogenous variable names, in dataset column order.
    pub var_names: Vec<String>,
    /// Lag order of the underlying levels VAR (the VECM has `p - 1` lagged
    /// difference terms).
    pub p: usize,
    /// Cointegration rank, `1..K-1`.
    pub rank: usize,
    /// Loading matrix, `K x rank`.
    pub alpha: DMatrix<f64>,
    /// Cointegrating relations as columns, `K x rank`, each normalized to
    /// unit length with its largest-magnitude entry positive.
    pub beta: DMatrix<f64>,
    /// Short-run matrices `Gamma_1..Gamma_{p-1}`, each `K x K`.
    pub gamma: Vec<DMatrix<f64>>,
    /// Unrestricted constant, one entry per equation.
    pub constant: DVector<f64>,
    /// Residual covariance with denominator `nobs - regressors`.
    pub sigma: DMatrix<f64>,
    /// Usable observations `T - p`.
    pub nobs: usize,
    /// Last `p` rows of the estimation sample, the forecast origin.
    pub levels_tail: DMatrix<f64>,
}

/// Fit a VECM with the given levels lag order and cointegration rank.
///
/// `beta` comes from the Johansen eigenvectors; `alpha`, the short-run
/// matrices, and the constant come from least squares of the differences on
/// the error-correction terms, lagged differences, and a constant.
pub fn fit_vecm(d: &Dataset, p: usize, rank: usize) -> Result<VecmFit> {
    let k = d.n_columns();
    if k < 2 {
        return Err(VarError::InvalidSpec(
            "a VECM needs at least two variables".into(),
        ));
    }
    if rank == 0 {
        return Err(VarError::InvalidRank(
            "rank 0 has no error-correction term; fit a VAR in first differences instead".into(),
        ));
    }
    if rank >= k {
        return Err(VarError::InvalidRank(format!(
            "rank {rank} of a {k}-variable system leaves no common trend; fit a levels VAR instead"
        )));
    }
    let core = reduced_rank(d, p)?;
    let n = core.n;

    // Normalize the first `rank` eigenvectors: unit length, largest-|.|
    // entry positive. The span (all that is identified) is unchanged.
    let mut beta = DMatrix::zeros(k, rank);
    for c in 0..rank {
        let col = core.beta.column(c);
        let norm = col.norm();
        if norm == 0.0 {
            return Err(VarError::Singular("degenerate cointegrating vector".into()));
        }
        let lead = col
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.abs().partial_cmp(&b.abs()).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let sign = if col[lead] < 0.0 { -1.0 } else { 1.0 };
        beta.set_column(c, &(col * (sign / norm)));
    }

    // Regress dY on [ect, lagged dY, const].
    let ect = &core.z1 * &beta;
    let z2_cols = core.z2.ncols();
    let m = rank + z2_cols;
    let mut design = DMatrix::zeros(n, m);
    design.view_mut((0, 0), (n, rank)).copy_from(&ect);
    design.view_mut((0, rank), (n, z2_cols)).copy_from(&core.z2);
    let (coef, resid, _) = ols_multi(&core.z0, &design)
        .map_err(|e| VarError::Singular(format!("VECM design: {e}")))?;

    let alpha = DMatrix::from_fn(k, rank, |i, j| coef[(j, i)]);
    let mut gamma = Vec::with_capacity(p - 1);
    for lag in 1..p {
        gamma.push(DMatrix::from_fn(k, k, |i, j| {
            coef[(rank + (lag - 1) * k + j, i)]
        }));
    }
    let constant = DVector::from_fn(k, |i, _| coef[(m - 1, i)]);
    let sigma = resid.transpose() * &resid / (n - m) as f64;

    let t = d.len();
    let cols = d.columns();
    let levels_tail = DMatrix::from_fn(p, k, |i, j| cols[j].values()[t - p + i]);

    Ok(VecmFit {
        var_names: d.names().iter().map(|s| (*s).to_string()).collect(),
        p,
        rank,
        alpha,
        beta,
        gamma,
        constant,
        sigma,
        nobs: n,
        levels_tail,
    })
}

/// Iterate the VECM forward and integrate predicted differences back to
/// levels. Row `s` of the result is the forecast `s + 1` steps ahead.
pub fn forecast_vecm(fit: &VecmFit, steps: usize) -> Result<DMatrix<f64>> {
    if steps == 0 {
        return Err(VarError::InvalidParam("forecast needs steps >= 1".into()));
    }
    let k = fit.var_names.len();
    // History of levels, most recent last; grows as forecasts are appended.
    let mut history: Vec<DVector<f64>> = (0..fit.p)
        .map(|i| fit.levels_tail.row(i).transpose())
        .collect();
    let mut out = DMatrix::zeros(steps, k);
    for s in 0..steps {
        let last = &history[history.len() - 1];
        let mut delta = &fit.constant + &fit.alpha * (fit.beta.transpose() * last);
        for (lag, gamma) in fit.gamma.iter().enumerate() {
            // Gamma_{lag+1} multiplies dY_{t - lag}; with p levels of history
            // every required difference is available.
            let hi = &history[history.len() - 1 - lag];
            let lo = &history[history.len() - 2 - lag];
            delta += gamma * (hi - lo);
        }
        let next = last + delta;
        for j in 0..k {
            out[(s, j)] = next[j];
        }
        history.push(next);
    }
    Ok(out)
}
