use boombust_core::Dataset;
use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Result, VarError};
use crate::model::{fit_var, VarSpec};

/// Wald test that one column does not Granger-cause another.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct GrangerResult {
    pub cause: String,
    pub effect: String,
    pub lags: usize,
    /// Wald statistic for zeroing every lag of `cause` in the `effect`
    /// equation of the full VAR(p).
    pub stat: f64,
    /// Degrees of freedom of the chi-square reference (= `lags`).
    pub df: usize,
    pub p_value: f64,
}

/// Test whether `cause` Granger-causes `effect` inside a VAR(p) over all
/// columns of `d` (constant included, no seasonal dummies).
///
/// The statistic is `b' V^{-1} b` for the `p` coefficients of `cause` lags in
/// the `effect` equation, with `V` the usual per-equation OLS covariance
/// (degrees-of-freedom-adjusted residual variance). With `p = 1` it equals
/// the squared t-statistic of the single cross coefficient.
pub fn granger_wald(d: &Dataset, cause: &str, effect: &str, p: usize) -> Result<GrangerResult> {
    if cause == effect {
        return Err(VarError::IdenticalColumns(cause.to_string()));
    }
    let names = d.names();
    let cause_idx = names
        .iter()
        .position(|n| *n == cause)
        .ok_or_else(|| VarError::UnknownColumn(cause.to_string()))?;
    let effect_idx = names
        .iter()
        .position(|n| *n == effect)
        .ok_or_else(|| VarError::UnknownColumn(effect.to_string()))?;

    let fit = fit_var(d, VarSpec::with_constant(p)?)?;
    let k = fit.k();
    let n = fit.nobs;
    let m = fit.regressor_names.len();

    let resid = fit.residuals.column(effect_idx);
    let sigma2 = resid.dot(&resid) / (n - m) as f64;

    let rows: Vec<usize> = (1..=p).map(|lag| (lag - 1) * k + cause_idx).collect();
    let b = DVector::from_iterator(p, rows.iter().map(|&r| fit.coef[(r, effect_idx)]));
    let v = DMatrix::from_fn(p, p, |i, j| sigma2 * fit.xtx_inv[(rows[i], rows[j])]);
    let chol = v
        .cholesky()
        .ok_or_else(|| VarError::Singular("restriction covariance".into()))?;
    let stat = b.dot(&chol.solve(&b));

    let chi = ChiSquared::new(p as f64)
        .map_err(|e| VarError::InvalidParam(format!("chi-square: {e}")))?;
    let p_value = 1.0 - chi.cdf(stat);
    Ok(GrangerResult {
        cause: cause.to_string(),
        effect: effect.to_string(),
        lags: p,
        stat,
        df: p,
        p_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use boombust_core::{Month, TimeSeries};
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn simulated_pair(seed: u64, t: usize, cross: f64) -> Dataset {
        let mut rng = boombust_core::rng::substream(seed, 0);
        let mut x = vec![0.0];
        let mut y = vec![0.0];
        for i in 1..t {
            x.push(0.5 * x[i - 1] + rng.sample::<f64, _>(StandardNormal));
            y.push(0.3 * y[i - 1] + cross * x[i - 1] + rng.sample::<f64, _>(StandardNormal));
        }
        let start = Month::new(2000, 1).unwrap();
        Dataset::new(vec![
            TimeSeries::new("x", start, x).unwrap(),
            TimeSeries::new("y", start, y).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn single_lag_wald_is_the_squared_t_statistic() {
        let d = simulated_pair(41, 240, 0.4);
        let res = granger_wald(&d, "x", "y", 1).unwrap();
        let fit = fit_var(&d, VarSpec::with_constant(1).unwrap()).unwrap();
        let row = fit.table[1]
            .rows
            .iter()
            .find(|r| r.variable == "x.l1")
            .unwrap();
        assert!((res.stat - row.t_value * row.t_value).abs() < 1e-8);
        assert_eq!(res.df, 1);
    }

    #[test]
    fn a_strong_planted_cause_is_detected() {
        let d = simulated_pair(42, 400, 0.8);
        let res = granger_wald(&d, "x", "y", 2).unwrap();
        assert!(res.p_value < 1e-6, "p = {}", res.p_value);
        // The reverse direction has no mechanism.
        let rev = granger_wald(&d, "y", "x", 2).unwrap();
        assert!(rev.stat < res.stat);
    }

    #[test]
    fn identical_and_unknown_columns_error() {
        let d = simulated_pair(43, 120, 0.0);
        assert!(matches!(
            granger_wald(&d, "x", "x", 1),
            Err(VarError::IdenticalColumns(_))
        ));
        assert!(matches!(
            granger_wald(&d, "z", "x", 1),
            Err(VarError::UnknownColumn(_))
        ));
        assert!(matches!(
            granger_wald(&d, "x", "w", 1),
            Err(VarError::UnknownColumn(_))
        ));
    }
}
