use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::design::Design;
use crate::error::{RegressError, Result};

/// Divergence bound on standardized coefficients: crossing it during the
/// Newton iteration is taken as evidence of perfectly separable classes.
pub const SEPARATION_BOUND: f64 = 30.0;

const MAX_ITER: usize = 200;
/// Newton converges quadratically, so driving the score this far below the
/// advertised 1e-6 gradient bound costs at most a couple of extra steps and
/// buys coefficient agreement across reparameterizations.
const GRAD_TOL: f64 = 1e-10;

/// Numerically stable `log(1 + e^x)`.
pub(crate) fn log1p_exp(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Bernoulli log-likelihood `Σ yη − log(1 + e^η)`.
pub(crate) fn bernoulli_loglik(eta: &[f64], y: &[u8]) -> f64 {
    eta.iter()
        .zip(y)
        .map(|(&e, &yi)| f64::from(yi) * e - log1p_exp(e))
        .sum()
}

/// Maximum-likelihood logistic regression fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogitFit {
    names: Vec<String>,
    pub intercept: f64,
    pub slopes: Vec<f64>,
    /// Maximized log-likelihood.
    pub loglik: f64,
    /// Coefficient covariance (inverse observed information), row-major over
    /// (intercept, slopes).
    pub cov: Vec<Vec<f64>>,
    /// Standard errors, aligned with (intercept, slopes).
    pub se: Vec<f64>,
    pub iterations: usize,
    /// Max-norm of the score at the optimum.
    pub grad_max: f64,
}

impl LogitFit {
    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Linear predictor per row of a raw-scale design with matching columns.
    pub fn linear_predictor(&self, d: &Design) -> Result<Vec<f64>> {
        if d.names() != self.names.as_slice() {
            return Err(RegressError::InvalidDesign(format!(
                "fit covers {:?}, design has {:?}",
                self.names,
                d.names()
            )));
        }
        Ok(d.rows()
            .iter()
            .map(|row| self.intercept + row.iter().zip(&self.slopes).map(|(x, b)| x * b).sum::<f64>())
            .collect())
    }

    /// Predicted success probabilities.
    pub fn predict_proba(&self, d: &Design) -> Result<Vec<f64>> {
        Ok(self.linear_predictor(d)?.into_iter().map(sigmoid).collect())
    }

    /// Wald z statistics and two-sided p-values, aligned with
    /// (intercept, slopes).
    pub fn wald(&self) -> Vec<(f64, f64)> {
        use statrs::distribution::{ContinuousCDF, Normal};
        let n01 = Normal::new(0.0, 1.0).expect("standard normal");
        std::iter::once(self.intercept)
            .chain(self.slopes.iter().copied())
            .zip(&self.se)
            .map(|(b, &se)| {
                let z = b / se;
                (z, 2.0 * (1.0 - n01.cdf(z.abs())))
            })
            .collect()
    }
}

/// Fit a logistic regression by Newton's method (iteratively reweighted
/// least squares) with step halving.
///
/// Standard errors come from the inverse observed information at the
/// optimum. Perfectly separable classes are detected by a diverging
/// standardized coefficient and reported as an error.
pub fn fit_logit(d: &Design) -> Result<LogitFit> {
    if !d.has_both_classes() {
        return Err(RegressError::SingleClass(format!(
            "all {} responses are {}",
            d.n(),
            d.response()[0]
        )));
    }
    let n = d.n();
    let p = d.p();
    if n <= p + 1 {
        return Err(RegressError::InvalidDesign(format!(
            "{n} rows cannot identify {p} slopes plus an intercept"
        )));
    }
    let x = d.with_intercept();
    let y: Vec<u8> = d.response().to_vec();
    let yv = DVector::from_iterator(n, y.iter().map(|&v| f64::from(v)));
    // Column scales for the divergence check: a coefficient's standardized
    // magnitude is |β_j|·sd_j.
    let (_, sds) = d.column_moments();

    let mut beta = DVector::zeros(p + 1);
    let mut eta = &x * &beta;
    let mut ll = bernoulli_loglik(eta.as_slice(), &y);
    let mut iterations = 0;
    loop {
        iterations += 1;
        let probs = DVector::from_iterator(n, eta.iter().map(|&e| sigmoid(e)));
        let score = x.transpose() * (&yv - &probs);
        let grad_max = score.amax();
        if grad_max < GRAD_TOL {
            let info = information(&x, &probs);
            let chol = info.clone().cholesky().ok_or_else(|| {
                RegressError::SingularInformation("observed information not positive definite".into())
            })?;
            let cov = chol.inverse();
            let se: Vec<f64> = (0..=p).map(|j| cov[(j, j)].sqrt()).collect();
            return Ok(LogitFit {
                names: d.names().to_vec(),
                intercept: beta[0],
                slopes: beta.as_slice()[1..].to_vec(),
                loglik: ll,
                cov: (0..=p).map(|i| (0..=p).map(|j| cov[(i, j)]).collect()).collect(),
                se,
                iterations,
                grad_max,
            });
        }
        if iterations > MAX_ITER {
            return Err(RegressError::NoConvergence { iters: MAX_ITER, criterion: grad_max });
        }
        let info = information(&x, &probs);
        let chol = info.cholesky().ok_or_else(|| {
            RegressError::SingularInformation("observed information not positive definite".into())
        })?;
        let mut step = chol.solve(&score);
        // Step halving keeps the likelihood ascent monotone on badly scaled
        // problems.
        let mut halvings = 0;
        loop {
            let cand = &beta + &step;
            let cand_eta = &x * &cand;
            let cand_ll = bernoulli_loglik(cand_eta.as_slice(), &y);
            if cand_ll >= ll - 1e-12 || halvings >= 30 {
                beta = cand;
                eta = cand_eta;
                ll = cand_ll;
                break;
            }
            step *= 0.5;
            halvings += 1;
        }
        for j in 1..=p {
            if (beta[j] * sds[j - 1]).abs() > SEPARATION_BOUND {
                return Err(RegressError::PerfectSeparation {
                    bound: SEPARATION_BOUND,
                    iters: iterations,
                });
            }
        }
    }
}

/// Observed information `X' W X` with `W = diag(p(1-p))`, floored away from
/// zero so the Cholesky factorization stays meaningful near convergence.
fn information(x: &DMatrix<f64>, probs: &DVector<f64>) -> DMatrix<f64> {
    let w = DVector::from_iterator(probs.len(), probs.iter().map(|&p| (p * (1.0 - p)).max(1e-12)));
    let mut xw = x.clone();
    for (i, mut row) in xw.row_iter_mut().enumerate() {
        row *= w[i];
    }
    x.transpose() * xw
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn intercept_only_matches_the_log_odds() {
        // Mean 0.25 response: β0 = log(0.25/0.75).
        let d = Design::new(
            &[],
            vec![vec![]; 8],
            vec![1, 0, 0, 0, 1, 0, 0, 0],
        )
        .unwrap();
        let fit = fit_logit(&d).unwrap();
        assert!(fit.slopes.is_empty());
        assert_abs_diff_eq!(fit.intercept, (0.25f64 / 0.75).ln(), epsilon = 1e-8);
        assert!(fit.grad_max < 1e-6);
        // Loglik at the optimum: 8[p̄ log p̄ + (1−p̄) log(1−p̄)].
        let expect = 8.0 * (0.25 * 0.25f64.ln() + 0.75 * 0.75f64.ln());
        assert_abs_diff_eq!(fit.loglik, expect, epsilon = 1e-10);
    }

    #[test]
    fn separable_data_is_reported_as_such() {
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64]).collect();
        let y: Vec<u8> = (0..20).map(|i| u8::from(i >= 10)).collect();
        let d = Design::new(&["x"], rows, y).unwrap();
        assert!(matches!(fit_logit(&d), Err(RegressError::PerfectSeparation { .. })));
    }

    #[test]
    fn single_class_and_tiny_samples_error() {
        let d = Design::new(&["x"], vec![vec![1.0], vec![2.0], vec![3.0]], vec![1, 1, 1]).unwrap();
        assert!(matches!(fit_logit(&d), Err(RegressError::SingleClass(_))));
        let d = Design::new(&["x"], vec![vec![1.0], vec![2.0]], vec![0, 1]).unwrap();
        assert!(matches!(fit_logit(&d), Err(RegressError::InvalidDesign(_))));
    }

    #[test]
    fn collinear_features_break_the_information_matrix() {
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|i| {
                let v = (i % 7) as f64 - 3.0;
                vec![v, 2.0 * v]
            })
            .collect();
        let y: Vec<u8> = (0..30).map(|i| u8::from(i % 3 == 0)).collect();
        let d = Design::new(&["a", "b"], rows, y).unwrap();
        assert!(matches!(fit_logit(&d), Err(RegressError::SingularInformation(_))));
    }

    #[test]
    fn prediction_requires_matching_columns() {
        let d = Design::new(
            &["x"],
            vec![vec![0.0], vec![1.0], vec![-1.0], vec![0.5], vec![2.0], vec![-2.0]],
            vec![1, 1, 0, 0, 1, 0],
        )
        .unwrap();
        let fit = fit_logit(&d).unwrap();
        let probs = fit.predict_proba(&d).unwrap();
        assert_eq!(probs.len(), 6);
        assert!(probs.iter().all(|p| (0.0..=1.0).contains(p)));
        let other = Design::new(&["z"], vec![vec![1.0]], vec![0]).unwrap();
        assert!(fit.predict_proba(&other).is_err());
    }

    #[test]
    fn wald_table_is_aligned_and_sane() {
        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![((i * 17) % 9) as f64 - 4.0]).collect();
        let y: Vec<u8> = (0..40).map(|i| u8::from((i * 13) % 5 < 2)).collect();
        let d = Design::new(&["x"], rows, y).unwrap();
        let fit = fit_logit(&d).unwrap();
        let wald = fit.wald();
        assert_eq!(wald.len(), 2);
        for (z, p) in wald {
            assert!(z.is_finite());
            assert!((0.0..=1.0).contains(&p));
        }
    }
}
