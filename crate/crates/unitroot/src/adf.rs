//! Augmented Dickey-Fuller regressions on full samples and on sub-sample
//! windows, the building block for the recursive exuberance statistics.
//!
//! The regression is
//!
//! ```text
//! Δy_t = a + b·t + γ·y_{t−1} + Σ_{j=1..k} φ_j·Δy_{t−j} + ε_t
//! ```
//!
//! with the deterministic part controlled by [`Deterministic`] and the lag
//! order `k` by [`LagRule`]. The test statistic is the t-ratio `γ̂ / se(γ̂)`.

use boombust_core::TimeSeries;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Result, UnitrootError};
use crate::tables;

/// Deterministic component of the ADF regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Deterministic {
    /// No deterministic terms.
    None,
    /// Intercept only.
    Constant,
    /// Intercept plus linear trend.
    ConstantTrend,
}

impl Deterministic {
    /// Number of deterministic regressors.
    pub fn count(self) -> usize {
        match self {
            Deterministic::None => 0,
            Deterministic::Constant => 1,
            Deterministic::ConstantTrend => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Deterministic::None => "none",
            Deterministic::Constant => "constant",
            Deterministic::ConstantTrend => "constant_trend",
        }
    }
}

/// Lag-order rule for the augmentation terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LagRule {
    /// Use exactly `k` lagged differences.
    Fixed(usize),
    /// Choose `k` in `[0, kmax]` by BIC on a common estimation sample, then
    /// refit the winner on the longest sample it allows.
    Bic(usize),
}

impl LagRule {
    /// The largest lag order the rule can select.
    pub fn max_lag(self) -> usize {
        match self {
            LagRule::Fixed(k) => k,
            LagRule::Bic(kmax) => kmax,
        }
    }

    pub fn label(self) -> String {
        match self {
            LagRule::Fixed(k) => format!("fixed({k})"),
            LagRule::Bic(kmax) => format!("bic({kmax})"),
        }
    }
}

/// Specification of the ADF regression used by every test in this crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdfSpec {
    pub deterministic: Deterministic,
    pub lag_rule: LagRule,
}

impl AdfSpec {
    pub fn new(deterministic: Deterministic, lag_rule: LagRule) -> Self {
        Self { deterministic, lag_rule }
    }

    /// Intercept-only regression with no augmentation lags: the workhorse
    /// specification for the recursive scans.
    pub fn constant_lag0() -> Self {
        Self::new(Deterministic::Constant, LagRule::Fixed(0))
    }

    /// Intercept-only regression with BIC lag selection over the
    /// conventional `floor(12·(T/100)^(1/4))` upper bound.
    pub fn constant_bic(t: usize) -> Self {
        Self::new(Deterministic::Constant, LagRule::Bic(default_kmax(t)))
    }

    /// Unique short descriptor, embedded in critical-value tables so a table
    /// can never silently be reused with a different regression.
    pub fn descriptor(&self) -> String {
        format!("{}|{}", self.deterministic.label(), self.lag_rule.label())
    }
}

/// Conventional Schwert upper bound for lag selection.
pub fn default_kmax(t: usize) -> usize {
    (12.0 * (t as f64 / 100.0).powf(0.25)).floor() as usize
}

/// Result of a single ADF regression.
///
/// Critical values are finite-sample quantiles simulated once under the
/// unit-root null and shipped with the crate (interpolated in the sample
/// size). `crit_left` holds the lower-tail quantiles used when rejecting the
/// unit root in favour of stationarity; `crit_right` the upper-tail quantiles
/// used when rejecting in favour of explosive behaviour. Both are indexed by
/// [`AdfTest::LEVELS`].
#[derive(Debug, Clone)]
pub struct AdfTest {
    /// t-ratio of the `y_{t−1}` coefficient.
    pub statistic: f64,
    /// Lag order actually used.
    pub lag: usize,
    /// Lower-tail critical values at 1%, 5%, 10%.
    pub crit_left: [f64; 3],
    /// Upper-tail critical values at 1%, 5%, 10%.
    pub crit_right: [f64; 3],
    /// `statistic < crit_left[i]`: unit root rejected, series stationary.
    pub reject_left: [bool; 3],
    /// `statistic > crit_right[i]`: unit root rejected, series explosive.
    pub reject_right: [bool; 3],
}

impl AdfTest {
    /// Significance levels for the critical-value arrays.
    pub const LEVELS: [f64; 3] = [0.01, 0.05, 0.10];
}

/// Augmented Dickey-Fuller test on a full series.
///
/// Requires at least `10 + regressors` usable observations after lagging and
/// differencing, where the regressor count includes the deterministic terms,
/// `y_{t−1}`, and the augmentation lags.
pub fn adf_test(s: &TimeSeries, spec: &AdfSpec) -> Result<AdfTest> {
    let y = s.values();
    let t = y.len();
    let kmax = spec.lag_rule.max_lag();
    let regressors = spec.deterministic.count() + 1 + kmax;
    let usable = t.saturating_sub(1 + kmax);
    let needed = 10 + regressors;
    if usable < needed {
        return Err(UnitrootError::InsufficientLength { needed, got: usable });
    }
    let (statistic, lag) = window_stat(y, 0, t, spec)?;
    let (crit_left, crit_right) = tables::adf_crit(spec.deterministic, t);
    Ok(AdfTest {
        statistic,
        lag,
        crit_left,
        crit_right,
        reject_left: [
            statistic < crit_left[0],
            statistic < crit_left[1],
            statistic < crit_left[2],
        ],
        reject_right: [
            statistic > crit_right[0],
            statistic > crit_right[1],
            statistic > crit_right[2],
        ],
    })
}

/// ADF t-ratio on the window `y[start..end]`, applying the lag rule inside
/// the window. Returns `(statistic, chosen_lag)`.
///
/// Unlike [`adf_test`], this only requires enough observations to leave one
/// residual degree of freedom; the recursive scans run it on windows as short
/// as ten observations.
pub(crate) fn window_stat(
    y: &[f64],
    start: usize,
    end: usize,
    spec: &AdfSpec,
) -> Result<(f64, usize)> {
    debug_assert!(end <= y.len() && start < end);
    match spec.lag_rule {
        LagRule::Fixed(k) => Ok((fit_window(y, start, end, spec.deterministic, k)?, k)),
        LagRule::Bic(kmax) => {
            // Compare candidates on the common sample implied by kmax:
            // observations t in [start+1+kmax, end).
            let n_common = (end - start).saturating_sub(1 + kmax);
            let max_regs = spec.deterministic.count() + 1 + kmax;
            if n_common < max_regs + 1 {
                return Err(UnitrootError::InsufficientLength {
                    needed: max_regs + 1,
                    got: n_common,
                });
            }
            let mut best = (f64::INFINITY, 0usize);
            for k in 0..=kmax {
                let p = spec.deterministic.count() + 1 + k;
                let ssr = fit_ssr(y, start + kmax - k, end, spec.deterministic, k)?;
                let n = n_common as f64;
                let bic = n * (ssr / n).max(f64::MIN_POSITIVE).ln() + (p as f64) * n.ln();
                if bic < best.0 {
                    best = (bic, k);
                }
            }
            let k = best.1;
            Ok((fit_window(y, start, end, spec.deterministic, k)?, k))
        }
    }
}

/// Fit the ADF regression on `y[start..end]` with fixed lag `k` and return
/// the t-ratio of `γ̂`.
fn fit_window(y: &[f64], start: usize, end: usize, det: Deterministic, k: usize) -> Result<f64> {
    if k == 0 {
        match det {
            Deterministic::None => return fast_stat_none(y, start, end),
            Deterministic::Constant => return fast_stat_constant(y, start, end),
            Deterministic::ConstantTrend => {}
        }
    }
    general_stat(y, start, end, det, k).map(|(stat, _)| stat)
}

/// SSR of the ADF regression whose estimation sample starts at observation
/// `start + 1 + k` (callers shift `start` to align candidate samples).
fn fit_ssr(y: &[f64], start: usize, end: usize, det: Deterministic, k: usize) -> Result<f64> {
    general_stat(y, start, end, det, k).map(|(_, ssr)| ssr)
}

/// Closed-form t-ratio for `Δy_t = γ·y_{t−1} + ε_t`.
fn fast_stat_none(y: &[f64], start: usize, end: usize) -> Result<f64> {
    let n = end - start - 1;
    if n < 2 {
        return Err(UnitrootError::InsufficientLength { needed: 2, got: n });
    }
    let (mut sxx, mut sxd, mut sdd) = (0.0, 0.0, 0.0);
    for t in start + 1..end {
        let x = y[t - 1];
        let d = y[t] - y[t - 1];
        sxx += x * x;
        sxd += x * d;
        sdd += d * d;
    }
    t_ratio(sxx, sxd, sdd, n as f64 - 1.0)
}

/// Closed-form t-ratio for `Δy_t = a + γ·y_{t−1} + ε_t` via centered moments.
fn fast_stat_constant(y: &[f64], start: usize, end: usize) -> Result<f64> {
    let n = end - start - 1;
    if n < 3 {
        return Err(UnitrootError::InsufficientLength { needed: 3, got: n });
    }
    let nf = n as f64;
    let (mut sx, mut sd) = (0.0, 0.0);
    for t in start + 1..end {
        sx += y[t - 1];
        sd += y[t] - y[t - 1];
    }
    let (mx, md) = (sx / nf, sd / nf);
    let (mut cxx, mut cxd, mut cdd) = (0.0, 0.0, 0.0);
    for t in start + 1..end {
        let x = y[t - 1] - mx;
        let d = y[t] - y[t - 1] - md;
        cxx += x * x;
        cxd += x * d;
        cdd += d * d;
    }
    t_ratio(cxx, cxd, cdd, nf - 2.0)
}

fn t_ratio(sxx: f64, sxd: f64, sdd: f64, df: f64) -> Result<f64> {
    if sxx <= 0.0 {
        return Err(UnitrootError::Singular("degenerate regressor on window".into()));
    }
    let gamma = sxd / sxx;
    let ssr = (sdd - gamma * sxd).max(0.0);
    if ssr <= 0.0 || df <= 0.0 {
        return Err(UnitrootError::Singular("perfect fit on window".into()));
    }
    let se = (ssr / df / sxx).sqrt();
    Ok(gamma / se)
}

/// General ADF regression via least squares. Returns `(t-ratio, SSR)`.
fn general_stat(
    y: &[f64],
    start: usize,
    end: usize,
    det: Deterministic,
    k: usize,
) -> Result<(f64, f64)> {
    let span = end - start;
    let n = span.saturating_sub(1 + k);
    let det_count = det.count();
    let p = det_count + 1 + k;
    if n < p + 1 {
        return Err(UnitrootError::InsufficientLength { needed: p + 1, got: n });
    }
    let mut x = DMatrix::<f64>::zeros(n, p);
    let mut b = DVector::<f64>::zeros(n);
    for (row, t) in (start + 1 + k..end).enumerate() {
        let mut col = 0;
        if det_count >= 1 {
            x[(row, col)] = 1.0;
            col += 1;
        }
        if det_count == 2 {
            // Within-window time index, 1-based.
            x[(row, col)] = (t - start) as f64;
            col += 1;
        }
        x[(row, col)] = y[t - 1];
        col += 1;
        for j in 1..=k {
            x[(row, col)] = y[t - j] - y[t - j - 1];
            col += 1;
        }
        debug_assert_eq!(col, p);
        b[row] = y[t] - y[t - 1];
    }
    let gamma_col = det_count;
    let fit = boombust_core::linalg::ols(&b, &x)
        .map_err(|e| UnitrootError::Singular(e.to_string()))?;
    let se = fit.se[gamma_col];
    if !se.is_finite() || se <= 0.0 {
        return Err(UnitrootError::Singular("zero standard error on window".into()));
    }
    let ssr = fit.resid.iter().map(|e| e * e).sum::<f64>();
    Ok((fit.coef[gamma_col] / se, ssr))
}
