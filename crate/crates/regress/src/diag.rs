use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use boombust_core::linalg::ols;
use nalgebra::{DMatrix, DVector};

use crate::design::Design;
use crate::error::{RegressError, Result};
use crate::logit::{fit_logit, LogitFit};

/// Model diagnostics: multicollinearity, specification, and overall fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Variance inflation factor per feature; `+∞` marks a perfectly
    /// collinear column.
    pub vif: Vec<f64>,
    /// Specification (link) test: Wald p-value of the squared linear
    /// predictor in a refit on (η̂, η̂²).
    pub link_test_p: f64,
    /// Likelihood-ratio statistic of the model against intercept-only.
    pub lrt_stat: f64,
    pub lrt_p: f64,
}

/// Variance inflation factors: `VIF_j = 1/(1 − R²_j)` from regressing
/// feature `j` on the remaining features plus an intercept. A singular
/// auxiliary regression (perfect collinearity) reports `+∞`.
pub fn vif(d: &Design) -> Result<Vec<f64>> {
    let n = d.n();
    let p = d.p();
    let mut out = Vec::with_capacity(p);
    for j in 0..p {
        if p == 1 {
            out.push(1.0);
            continue;
        }
        let yj = DVector::from_iterator(n, d.rows().iter().map(|r| r[j]));
        let x = DMatrix::from_fn(n, p, |i, c| {
            if c == 0 {
                1.0
            } else {
                let col = if c - 1 < j { c - 1 } else { c };
                d.rows()[i][col]
            }
        });
        let sst: f64 = {
            let mean = yj.iter().sum::<f64>() / n as f64;
            yj.iter().map(|v| (v - mean).powi(2)).sum()
        };
        if sst <= 0.0 {
            return Err(RegressError::InvalidDesign(format!(
                "constant feature {} has no variance to inflate",
                d.names()[j]
            )));
        }
        match ols(&yj, &x) {
            Ok(fit) => {
                let ssr: f64 = fit.resid.iter().map(|r| r * r).sum();
                let r2 = 1.0 - ssr / sst;
                if r2 >= 1.0 - 1e-12 {
                    out.push(f64::INFINITY);
                } else {
                    out.push(1.0 / (1.0 - r2));
                }
            }
            // A singular auxiliary design means exact collinearity among the
            // other columns; the factor is unbounded.
            Err(_) => out.push(f64::INFINITY),
        }
    }
    Ok(out)
}

/// Specification (link) test: refit on the fitted linear predictor and its
/// square; a significant square term indicates a misspecified index.
pub fn link_test(d: &Design, fit: &LogitFit) -> Result<f64> {
    let eta = fit.linear_predictor(d)?;
    let rows: Vec<Vec<f64>> = eta.iter().map(|&e| vec![e, e * e]).collect();
    let aug = Design::new(&["eta", "eta2"], rows, d.response().to_vec())?;
    let refit = fit_logit(&aug)?;
    // Wald p-value of the η̂² coefficient (intercept, η̂, η̂²).
    Ok(refit.wald()[2].1)
}

/// Full diagnostic battery for a fitted logistic regression.
pub fn diagnostics(d: &Design, fit: &LogitFit) -> Result<Diagnostics> {
    if d.names() != fit.names() {
        return Err(RegressError::InvalidDesign(format!(
            "fit covers {:?}, design has {:?}",
            fit.names(),
            d.names()
        )));
    }
    let p = d.p();
    if p == 0 {
        return Err(RegressError::InvalidDesign(
            "diagnostics need at least one feature".into(),
        ));
    }
    let vif = vif(d)?;
    let link_test_p = link_test(d, fit)?;
    // Likelihood ratio against the intercept-only model, χ²(p).
    let p_bar = d.class_rate();
    let n = d.n() as f64;
    let ll0 = n * (p_bar * p_bar.ln() + (1.0 - p_bar) * (1.0 - p_bar).ln());
    let lrt_stat = (2.0 * (fit.loglik - ll0)).max(0.0);
    let chi = ChiSquared::new(p as f64).expect("χ²(p)");
    let lrt_p = 1.0 - chi.cdf(lrt_stat);
    Ok(Diagnostics { vif, link_test_p, lrt_stat, lrt_p })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn orthogonal_features_have_unit_vif() {
        // Perfectly balanced ±1 design: the two columns are orthogonal and
        // centered, so each auxiliary R² is exactly 0.
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let a = if i % 2 == 0 { 1.0 } else { -1.0 };
                let b = if (i / 2) % 2 == 0 { 1.0 } else { -1.0 };
                vec![a, b]
            })
            .collect();
        let y: Vec<u8> = (0..40).map(|i| u8::from((i * 7) % 3 == 0)).collect();
        let d = Design::new(&["a", "b"], rows, y).unwrap();
        for v in vif(&d).unwrap() {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn planted_correlation_gives_the_closed_form_vif() {
        // Two columns with sample correlation exactly 0.9: regressing one on
        // the other gives R² = 0.81, so VIF = 1/(1 − 0.81) = 5.2631…
        // Construction: b = 0.9·a + √(1−0.81)·c with a ⊥ c, both unit-norm
        // centered.
        let n = 8;
        let a: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let c: Vec<f64> = (0..n).map(|i| if (i / 2) % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| vec![a[i], 0.9 * a[i] + (1.0f64 - 0.81).sqrt() * c[i]])
            .collect();
        let y: Vec<u8> = (0..n).map(|i| u8::from(i < 4)).collect();
        let d = Design::new(&["a", "b"], rows, y).unwrap();
        let v = vif(&d).unwrap();
        assert_abs_diff_eq!(v[0], 1.0 / (1.0 - 0.81), epsilon = 1e-9);
        assert_abs_diff_eq!(v[1], 1.0 / (1.0 - 0.81), epsilon = 1e-9);
    }

    #[test]
    fn perfect_collinearity_reports_infinite_vif() {
        let rows: Vec<Vec<f64>> = (0..20)
            .map(|i| {
                let v = ((i * 5) % 7) as f64;
                vec![v, 3.0 * v]
            })
            .collect();
        let y: Vec<u8> = (0..20).map(|i| u8::from(i % 2 == 0)).collect();
        let d = Design::new(&["a", "b"], rows, y).unwrap();
        let v = vif(&d).unwrap();
        assert!(v[0].is_infinite() && v[1].is_infinite());
    }

    #[test]
    fn diagnostics_demand_matching_designs() {
        let rows: Vec<Vec<f64>> = (0..30).map(|i| vec![((i * 11) % 13) as f64 - 6.0]).collect();
        let y: Vec<u8> = (0..30).map(|i| u8::from((i * 7) % 4 < 2)).collect();
        let d = Design::new(&["x"], rows, y).unwrap();
        let fit = fit_logit(&d).unwrap();
        let diag = diagnostics(&d, &fit).unwrap();
        assert_eq!(diag.vif.len(), 1);
        assert!((0.0..=1.0).contains(&diag.link_test_p));
        assert!(diag.lrt_stat >= 0.0);
        let renamed = Design::new(
            &["z"],
            d.rows().to_vec(),
            d.response().to_vec(),
        )
        .unwrap();
        assert!(diagnostics(&renamed, &fit).is_err());
    }
}
