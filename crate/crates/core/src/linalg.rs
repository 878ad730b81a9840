use nalgebra::{DMatrix, DVector};

use crate::error::CoreError;

/// Ordinary least squares fit of `y` on the columns of `x`.
#[derive(Debug, Clone)]
pub struct OlsFit {
    /// Coefficient estimates, one per design column.
    pub coef: DVector<f64>,
    /// Residuals `y - x * coef`.
    pub resid: DVector<f64>,
    /// Residual variance with denominator `n - k`.
    pub sigma2: f64,
    /// `(X'X)^{-1}`, for coefficient covariance `sigma2 * xtx_inv`.
    pub xtx_inv: DMatrix<f64>,
    /// Standard errors `sqrt(sigma2 * diag(xtx_inv))`.
    pub se: DVector<f64>,
    /// Residual degrees of freedom `n - k`.
    pub df: usize,
}

/// OLS via the normal equations with a Cholesky solve.
///
/// Errors when the design is singular (or `n <= k`, leaving no residual
/// degrees of freedom).
pub fn ols(y: &DVector<f64>, x: &DMatrix<f64>) -> Result<OlsFit, CoreError> {
    let n = x.nrows();
    let k = x.ncols();
    if y.len() != n {
        return Err(CoreError::Misaligned(format!(
            "ols: y has {} rows, X has {n}",
            y.len()
        )));
    }
    if n <= k {
        return Err(CoreError::Linalg(format!(
            "ols: {n} observations cannot identify {k} coefficients"
        )));
    }
    let xtx = x.transpose() * x;
    let chol = xtx
        .clone()
        .cholesky()
        .ok_or_else(|| CoreError::Linalg("ols: singular design matrix".into()))?;
    let xty = x.transpose() * y;
    let coef = chol.solve(&xty);
    let xtx_inv = chol.inverse();
    let resid = y - x * &coef;
    let df = n - k;
    let sigma2 = resid.dot(&resid) / df as f64;
    let se = DVector::from_iterator(k, (0..k).map(|j| (sigma2 * xtx_inv[(j, j)]).sqrt()));
    Ok(OlsFit {
        coef,
        resid,
        sigma2,
        xtx_inv,
        se,
        df,
    })
}

/// OLS with a shared design and many responses: returns the `k x m`
/// coefficient matrix, the `n x m` residual matrix, and `(X'X)^{-1}`.
pub fn ols_multi(
    ys: &DMatrix<f64>,
    x: &DMatrix<f64>,
) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>), CoreError> {
    let n = x.nrows();
    let k = x.ncols();
    if ys.nrows() != n {
        return Err(CoreError::Misaligned(format!(
            "ols_multi: Y has {} rows, X has {n}",
            ys.nrows()
        )));
    }
    if n <= k {
        return Err(CoreError::Linalg(format!(
            "ols_multi: {n} observations cannot identify {k} coefficients"
        )));
    }
    let xtx = x.transpose() * x;
    let chol = xtx
        .cholesky()
        .ok_or_else(|| CoreError::Linalg("ols_multi: singular design matrix".into()))?;
    let coef = chol.solve(&(x.transpose() * ys));
    let resid = ys - x * &coef;
    Ok((coef, resid, chol.inverse()))
}

/// Solve the discrete Lyapunov equation `P = A P A' + Q` by vectorization:
/// `(I - A (x) A) vec(P) = vec(Q)`. Suitable for the moderate state
/// dimensions used here.
pub fn solve_discrete_lyapunov(
    a: &DMatrix<f64>,
    q: &DMatrix<f64>,
) -> Result<DMatrix<f64>, CoreError> {
    let m = a.nrows();
    if a.ncols() != m || q.nrows() != m || q.ncols() != m {
        return Err(CoreError::Misaligned("lyapunov: non-square inputs".into()));
    }
    let kron = a.kronecker(a);
    let lhs = DMatrix::identity(m * m, m * m) - kron;
    let vec_q = DVector::from_iterator(m * m, q.iter().cloned());
    let lu = lhs.lu();
    let sol = lu
        .solve(&vec_q)
        .ok_or_else(|| CoreError::Linalg("lyapunov: I - A(x)A singular (non-stationary A)".into()))?;
    let p = DMatrix::from_iterator(m, m, sol.iter().cloned());
    // Symmetrize against round-off.
    Ok((&p + p.transpose()) * 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ols_recovers_exact_line() {
        // y = 2 + 3x fit with intercept + slope columns.
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0];
        let x = DMatrix::from_fn(5, 2, |i, j| if j == 0 { 1.0 } else { xs[i] });
        let y = DVector::from_iterator(5, xs.iter().map(|v| 2.0 + 3.0 * v));
        let fit = ols(&y, &x).unwrap();
        assert!((fit.coef[0] - 2.0).abs() < 1e-12);
        assert!((fit.coef[1] - 3.0).abs() < 1e-12);
        assert!(fit.sigma2 < 1e-24);
    }

    #[test]
    fn ols_matches_hand_computed_two_point_fit() {
        // y on intercept only: coef = mean, sigma2 = sample variance.
        let y = DVector::from_vec(vec![1.0, 3.0, 5.0, 9.0]);
        let x = DMatrix::from_element(4, 1, 1.0);
        let fit = ols(&y, &x).unwrap();
        assert!((fit.coef[0] - 4.5).abs() < 1e-14);
        // resid = [-3.5, -1.5, 0.5, 4.5]; SSR = 12.25+2.25+0.25+20.25 = 35; df = 3.
        assert!((fit.sigma2 - 35.0 / 3.0).abs() < 1e-12);
        // se = sqrt(sigma2 / n)
        assert!((fit.se[0] - (35.0_f64 / 3.0 / 4.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn singular_design_is_rejected() {
        let x = DMatrix::from_fn(4, 2, |i, _| i as f64); // duplicated column
        let y = DVector::from_vec(vec![0.0, 1.0, 2.0, 3.0]);
        assert!(ols(&y, &x).is_err());
    }

    #[test]
    fn lyapunov_solves_scalar_case() {
        // p = a^2 p + q -> p = q / (1 - a^2)
        let a = DMatrix::from_element(1, 1, 0.5);
        let q = DMatrix::from_element(1, 1, 3.0);
        let p = solve_discrete_lyapunov(&a, &q).unwrap();
        assert!((p[(0, 0)] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn lyapunov_fixed_point_holds_in_two_dims() {
        let a = DMatrix::from_row_slice(2, 2, &[0.7, 0.2, -0.1, 0.4]);
        let q = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 2.0]);
        let p = solve_discrete_lyapunov(&a, &q).unwrap();
        let rhs = &a * &p * a.transpose() + &q;
        assert!((&p - rhs).norm() < 1e-10);
    }
}
