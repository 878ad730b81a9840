use boombust_core::csvio::format_float;
use nalgebra::DMatrix;

use crate::error::{Result, VarError};
use crate::model::VarFit;

/// Orthogonalized impulse responses to a one-standard-deviation shock.
#[derive(Debug, Clone)]
pub struct IrfResult {
    /// Shocked variable.
    pub shock: String,
    /// Shock direction, `+1.0` or `-1.0`.
    pub sign: f64,
    /// Responding variables, in dataset column order (also the Cholesky
    /// ordering of the orthogonalization).
    pub variables: Vec<String>,
    /// Responses, row `h` = horizon `h` (0-based), one column per variable.
    pub responses: DMatrix<f64>,
    /// Whether every companion eigenvalue has modulus `< 1`; an unstable fit
    /// still yields responses but carries this warning flag.
    pub stable: bool,
    pub max_eigen_modulus: f64,
}

impl IrfResult {
    /// CSV lines `horizon,var1,var2,...`, one row per horizon.
    pub fn csv(&self) -> Vec<String> {
        let mut lines = vec![format!("horizon,{}", self.variables.join(","))];
        for h in 0..self.responses.nrows() {
            let mut line = h.to_string();
            for j in 0..self.responses.ncols() {
                line.push(',');
                line.push_str(&format_float(self.responses[(h, j)]));
            }
            lines.push(line);
        }
        lines
    }
}

/// Impulse responses over horizons `0..=horizons` to a one-standard-deviation
/// shock in `shock`, orthogonalized by the Cholesky factor of the fit's
/// residual covariance in dataset column order.
///
/// The horizon-0 response is exactly `sign` times the shock's column of the
/// lower-triangular Cholesky factor.
pub fn irf_cholesky(fit: &VarFit, horizons: usize, shock: &str, sign: f64) -> Result<IrfResult> {
    if sign != 1.0 && sign != -1.0 {
        return Err(VarError::InvalidParam(format!(
            "shock sign must be +1 or -1, got {sign}"
        )));
    }
    let k = fit.k();
    let shock_idx = fit
        .var_names
        .iter()
        .position(|n| n == shock)
        .ok_or_else(|| VarError::UnknownColumn(shock.to_string()))?;
    let chol = fit
        .sigma_u
        .clone()
        .cholesky()
        .ok_or_else(|| VarError::NotPositiveDefinite("residual covariance".into()))?;
    let lower = chol.l();
    let impulse = lower.column(shock_idx) * sign;

    // MA coefficients Phi_0 = I, Phi_h = sum_{l<=min(h,p)} Phi_{h-l} A_l.
    let a: Vec<DMatrix<f64>> = (1..=fit.spec.p).map(|lag| fit.a(lag)).collect();
    let mut phi: Vec<DMatrix<f64>> = vec![DMatrix::identity(k, k)];
    for h in 1..=horizons {
        let mut next = DMatrix::zeros(k, k);
        for (l, a_l) in a.iter().enumerate() {
            if h >= l + 1 {
                next += &phi[h - l - 1] * a_l;
            }
        }
        phi.push(next);
    }

    let mut responses = DMatrix::zeros(horizons + 1, k);
    for (h, phi_h) in phi.iter().enumerate() {
        let resp = phi_h * &impulse;
        for j in 0..k {
            responses[(h, j)] = resp[j];
        }
    }
    let max_eigen_modulus = fit.max_eigen_modulus();
    Ok(IrfResult {
        shock: shock.to_string(),
        sign,
        variables: fit.var_names.clone(),
        responses,
        stable: max_eigen_modulus < 1.0,
        max_eigen_modulus,
    })
}
