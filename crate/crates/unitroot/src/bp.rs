//! Breusch-Pagan heteroskedasticity diagnostic in the studentized (Koenker)
//! `n·R²` form, with the p-value taken from the χ² distribution whose degrees
//! of freedom equal the number of auxiliary regressors.

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Result, UnitrootError};

/// Result of the Breusch-Pagan test. The null hypothesis is
/// homoskedasticity; small p-values reject it.
#[derive(Debug, Clone)]
pub struct BreuschPagan {
    /// `n·R²` from the auxiliary regression of squared residuals.
    pub statistic: f64,
    /// Degrees of freedom (number of auxiliary regressors).
    pub df: usize,
    pub p_value: f64,
}

/// Breusch-Pagan test of regression residuals against candidate variance
/// drivers. `design` holds one row per residual with the regressors the
/// variance is tested against (no intercept column; one is added
/// internally).
pub fn breusch_pagan(residuals: &[f64], design: &[Vec<f64>]) -> Result<BreuschPagan> {
    if residuals.len() != design.len() {
        return Err(UnitrootError::DesignMismatch(format!(
            "{} residuals but {} design rows",
            residuals.len(),
            design.len()
        )));
    }
    let n = residuals.len();
    let p = design.first().map_or(0, Vec::len);
    if p == 0 {
        return Err(UnitrootError::DesignMismatch("empty design rows".into()));
    }
    if design.iter().any(|row| row.len() != p) {
        return Err(UnitrootError::DesignMismatch("ragged design rows".into()));
    }
    if n < p + 2 {
        return Err(UnitrootError::InsufficientLength { needed: p + 2, got: n });
    }
    if residuals.iter().all(|e| *e == 0.0) {
        return Err(UnitrootError::AllZeroResiduals);
    }

    let sq = DVector::from_iterator(n, residuals.iter().map(|e| e * e));
    let mut x = DMatrix::<f64>::zeros(n, p + 1);
    for (i, row) in design.iter().enumerate() {
        x[(i, 0)] = 1.0;
        for (j, v) in row.iter().enumerate() {
            x[(i, j + 1)] = *v;
        }
    }
    let fit = boombust_core::linalg::ols(&sq, &x)
        .map_err(|e| UnitrootError::Singular(e.to_string()))?;

    let mean = sq.iter().sum::<f64>() / n as f64;
    let sst = sq.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
    let ssr = fit.resid.iter().map(|e| e * e).sum::<f64>();
    // Constant squared residuals carry no heteroskedasticity signal.
    let r2 = if sst > 0.0 { (1.0 - ssr / sst).clamp(0.0, 1.0) } else { 0.0 };
    let statistic = n as f64 * r2;
    let chi = ChiSquared::new(p as f64).expect("positive degrees of freedom");
    let p_value = 1.0 - chi.cdf(statistic);
    Ok(BreuschPagan { statistic, df: p, p_value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use boombust_core::rng::substream;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn zero_residuals_are_rejected() {
        let design: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64]).collect();
        let err = breusch_pagan(&vec![0.0; 30], &design).unwrap_err();
        assert!(matches!(err, UnitrootError::AllZeroResiduals));
    }

    #[test]
    fn ragged_and_mismatched_designs_are_rejected() {
        let resid = vec![1.0, -1.0, 0.5];
        assert!(matches!(
            breusch_pagan(&resid, &[vec![1.0], vec![2.0]]).unwrap_err(),
            UnitrootError::DesignMismatch(_)
        ));
        assert!(matches!(
            breusch_pagan(&resid, &[vec![1.0], vec![2.0, 3.0], vec![4.0]]).unwrap_err(),
            UnitrootError::DesignMismatch(_)
        ));
    }

    #[test]
    fn strong_variance_gradient_is_detected() {
        let mut rng = substream(7_400, 0);
        let mut resid = Vec::new();
        let mut design = Vec::new();
        for i in 0..400 {
            let x = 0.5 + i as f64 / 100.0;
            let e: f64 = rng.sample(StandardNormal);
            resid.push(e * x);
            design.push(vec![x * x]);
        }
        let bp = breusch_pagan(&resid, &design).unwrap();
        assert!(bp.p_value < 0.01, "p = {}", bp.p_value);
    }

    #[test]
    fn homoskedastic_size_is_close_to_nominal() {
        let mut rejections = 0;
        let reps = 500;
        for seed in 0..reps {
            let mut rng = substream(7_600 + seed, 0);
            let mut resid = Vec::new();
            let mut design = Vec::new();
            for _ in 0..500 {
                let x1: f64 = rng.sample(StandardNormal);
                let x2: f64 = rng.sample(StandardNormal);
                let e: f64 = rng.sample(StandardNormal);
                resid.push(e);
                design.push(vec![x1, x2]);
            }
            if breusch_pagan(&resid, &design).unwrap().p_value < 0.05 {
                rejections += 1;
            }
        }
        let rate = rejections as f64 / reps as f64;
        assert!((rate - 0.05).abs() <= 0.02, "size {rate}");
    }
}
