//! KPSS stationarity test with a Bartlett-kernel long-run variance and the
//! conventional `floor(4·(T/100)^(1/4))` Newey-West bandwidth.

use boombust_core::TimeSeries;
use serde::{Deserialize, Serialize};

use crate::error::{Result, UnitrootError};
use crate::tables;

/// Deterministic component the series is stationary around under the null.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KpssDeterministic {
    /// Stationary around a constant level.
    Level,
    /// Stationary around a linear trend.
    Trend,
}

impl KpssDeterministic {
    pub fn label(self) -> &'static str {
        match self {
            KpssDeterministic::Level => "level",
            KpssDeterministic::Trend => "trend",
        }
    }
}

/// Result of a KPSS test. The null hypothesis is stationarity; large
/// statistics reject it. Critical values are finite-sample quantiles
/// simulated once under the null and shipped with the crate, indexed by
/// [`KpssTest::LEVELS`].
#[derive(Debug, Clone)]
pub struct KpssTest {
    pub statistic: f64,
    /// Bartlett truncation lag used for the long-run variance.
    pub bandwidth: usize,
    /// Upper-tail critical values at 10%, 5%, 2.5%, 1%.
    pub crit: [f64; 4],
    /// `statistic > crit[i]`: stationarity rejected.
    pub reject: [bool; 4],
}

impl KpssTest {
    /// Significance levels for the critical-value array.
    pub const LEVELS: [f64; 4] = [0.10, 0.05, 0.025, 0.01];
}

/// KPSS test of the null of (level- or trend-) stationarity.
pub fn kpss_test(s: &TimeSeries, deterministic: KpssDeterministic) -> Result<KpssTest> {
    let y = s.values();
    if y.len() < 20 {
        return Err(UnitrootError::InsufficientLength { needed: 20, got: y.len() });
    }
    let (statistic, bandwidth) = kpss_statistic(y, deterministic)?;
    let crit = tables::kpss_crit(deterministic, y.len());
    Ok(KpssTest {
        statistic,
        bandwidth,
        crit,
        reject: [
            statistic > crit[0],
            statistic > crit[1],
            statistic > crit[2],
            statistic > crit[3],
        ],
    })
}

/// Raw KPSS statistic `T^{-2} Σ S_t² / s²(ℓ)` and the bandwidth `ℓ` used.
pub(crate) fn kpss_statistic(y: &[f64], deterministic: KpssDeterministic) -> Result<(f64, usize)> {
    let t = y.len();
    let tf = t as f64;
    let resid = match deterministic {
        KpssDeterministic::Level => {
            let mean = y.iter().sum::<f64>() / tf;
            y.iter().map(|v| v - mean).collect::<Vec<f64>>()
        }
        KpssDeterministic::Trend => detrend(y),
    };

    let bandwidth = (4.0 * (tf / 100.0).powf(0.25)).floor() as usize;
    let gamma0 = resid.iter().map(|e| e * e).sum::<f64>() / tf;
    if gamma0 <= f64::MIN_POSITIVE {
        return Err(UnitrootError::ZeroLongRunVariance);
    }
    let mut lrv = gamma0;
    for j in 1..=bandwidth.min(t - 1) {
        let gamma_j = resid[j..]
            .iter()
            .zip(&resid[..t - j])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / tf;
        lrv += 2.0 * (1.0 - j as f64 / (bandwidth as f64 + 1.0)) * gamma_j;
    }
    if lrv <= f64::MIN_POSITIVE {
        return Err(UnitrootError::ZeroLongRunVariance);
    }

    let mut cum = 0.0;
    let mut sum_sq = 0.0;
    for e in &resid {
        cum += e;
        sum_sq += cum * cum;
    }
    Ok((sum_sq / (tf * tf) / lrv, bandwidth))
}

/// Residuals from an exact least-squares fit of `y` on `(1, t)`.
fn detrend(y: &[f64]) -> Vec<f64> {
    let n = y.len() as f64;
    let mean_t = (n + 1.0) / 2.0;
    let mean_y = y.iter().sum::<f64>() / n;
    let (mut stt, mut sty) = (0.0, 0.0);
    for (i, v) in y.iter().enumerate() {
        let dt = (i + 1) as f64 - mean_t;
        stt += dt * dt;
        sty += dt * (v - mean_y);
    }
    let slope = sty / stt;
    let intercept = mean_y - slope * mean_t;
    y.iter()
        .enumerate()
        .map(|(i, v)| v - intercept - slope * ((i + 1) as f64))
        .collect()
}
