use boombust_core::csvio::format_float;
use boombust_core::linalg::ols_multi;
use boombust_core::Dataset;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Result, VarError};

/// Months per seasonal cycle; the workspace is monthly throughout.
pub const SEASON_LENGTH: usize = 12;

/// Lag order plus deterministic terms of a VAR.
///
/// Invariants: `p >= 1`; `seasonal_dummies` is `0` or `SEASON_LENGTH - 1`.
/// Seasonal dummies use centered (sum-to-zero) coding anchored to the
/// calendar month, so `sd1..sd11` measure January..November offsets against
/// the annual mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarSpec {
    /// Lag order.
    pub p: usize,
    /// Include an unrestricted constant.
    pub constant: bool,
    /// Number of centered seasonal dummies (0 or 11).
    pub seasonal_dummies: usize,
}

impl VarSpec {
    pub fn new(p: usize, constant: bool, seasonal_dummies: usize) -> Result<Self> {
        if p == 0 {
            return Err(VarError::InvalidSpec("lag order p must be >= 1".into()));
        }
        if seasonal_dummies != 0 && seasonal_dummies != SEASON_LENGTH - 1 {
            return Err(VarError::InvalidSpec(format!(
                "seasonal dummy count must be 0 or {}, got {seasonal_dummies}",
                SEASON_LENGTH - 1
            )));
        }
        Ok(Self {
            p,
            constant,
            seasonal_dummies,
        })
    }

    /// Constant only, no seasonal dummies.
    pub fn with_constant(p: usize) -> Result<Self> {
        Self::new(p, true, 0)
    }

    /// Constant plus 11 centered seasonal dummies, the monthly layout.
    pub fn monthly(p: usize) -> Result<Self> {
        Self::new(p, true, SEASON_LENGTH - 1)
    }

    /// Number of deterministic regressors per equation.
    pub fn n_deterministic(&self) -> usize {
        usize::from(self.constant) + self.seasonal_dummies
    }

    /// Regressors per equation for a `k`-variable system.
    pub fn n_regressors(&self, k: usize) -> usize {
        k * self.p + self.n_deterministic()
    }
}

/// Lag-selection criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LagCriterion {
    Fpe,
    Aic,
    Bic,
    Hq,
}

impl std::str::FromStr for LagCriterion {
    type Err = VarError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fpe" => Ok(Self::Fpe),
            "aic" => Ok(Self::Aic),
            "bic" | "sc" => Ok(Self::Bic),
            "hq" | "hqc" => Ok(Self::Hq),
            other => Err(VarError::InvalidParam(format!(
                "unknown lag criterion {other:?} (expected fpe, aic, bic, or hq)"
            ))),
        }
    }
}

impl std::fmt::Display for LagCriterion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Self::Fpe => "fpe",
            Self::Aic => "aic",
            Self::Bic => "bic",
            Self::Hq => "hq",
        };
        f.write_str(name)
    }
}

/// Information criteria of a fitted VAR (ML residual covariance).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct InfoCriteria {
    pub fpe: f64,
    pub aic: f64,
    pub bic: f64,
    pub hq: f64,
}

impl InfoCriteria {
    /// `ln det` of the ML residual covariance with `n` observations and `m`
    /// regressors per equation in a `k`-variable system.
    fn from_parts(log_det: f64, n: usize, m: usize, k: usize) -> Self {
        let n = n as f64;
        let m = m as f64;
        let k = k as f64;
        Self {
            fpe: ((n + m) / (n - m)).powf(k) * log_det.exp(),
            aic: log_det + 2.0 * k * m / n,
            bic: log_det + n.ln() * k * m / n,
            hq: log_det + 2.0 * n.ln().ln() * k * m / n,
        }
    }

    pub fn value(&self, criterion: LagCriterion) -> f64 {
        match criterion {
            LagCriterion::Fpe => self.fpe,
            LagCriterion::Aic => self.aic,
            LagCriterion::Bic => self.bic,
            LagCriterion::Hq => self.hq,
        }
    }
}

/// One line of a per-equation coefficient table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoefRow {
    pub variable: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t_value: f64,
    pub p_value: f64,
}

/// Coefficient table of a single VAR equation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquationTable {
    /// Response variable of the equation.
    pub equation: String,
    pub rows: Vec<CoefRow>,
    /// Residual standard error with denominator `n - m`.
    pub resid_se: f64,
}

/// A fitted VAR(p).
#[derive(Debug, Clone)]
pub struct VarFit {
    pub spec: VarSpec,
    /// Endogenous variable names, in dataset column order.
    pub var_names: Vec<String>,
    /// Regressor names shared by every equation: lags (lag-major, variable
    /// minor), then `const`, then `sd1..sd11`.
    pub regressor_names: Vec<String>,
    /// Stacked coefficients, one column per equation, rows aligned with
    /// `regressor_names`.
    pub coef: DMatrix<f64>,
    /// Residual matrix, `nobs x k`.
    pub residuals: DMatrix<f64>,
    /// Residual covariance with denominator `nobs - m` (used for impulse
    /// responses and standard errors).
    pub sigma_u: DMatrix<f64>,
    /// ML residual covariance with denominator `nobs` (used for the
    /// log-likelihood and information criteria).
    pub sigma_ml: DMatrix<f64>,
    /// Usable observations `T - p`.
    pub nobs: usize,
    pub loglik: f64,
    pub criteria: InfoCriteria,
    /// Per-equation coefficient tables, one per endogenous variable.
    pub table: Vec<EquationTable>,
    /// `(X'X)^{-1}` of the shared design, for Wald restrictions.
    pub(crate) xtx_inv: DMatrix<f64>,
}

impl VarFit {
    pub fn k(&self) -> usize {
        self.var_names.len()
    }

    /// Lag coefficient matrix `A_lag` with `A[(i, j)]` the weight of variable
    /// `j` lagged `lag` periods in equation `i`. `lag` is 1-based.
    pub fn a(&self, lag: usize) -> DMatrix<f64> {
        assert!(
            lag >= 1 && lag <= self.spec.p,
            "lag {lag} outside 1..={}",
            self.spec.p
        );
        let k = self.k();
        DMatrix::from_fn(k, k, |i, j| self.coef[((lag - 1) * k + j, i)])
    }

    /// Deterministic coefficients, `k x n_deterministic`, columns ordered as
    /// the tail of `regressor_names`.
    pub fn det_coef(&self) -> DMatrix<f64> {
        let k = self.k();
        let d = self.spec.n_deterministic();
        let base = k * self.spec.p;
        DMatrix::from_fn(k, d, |i, c| self.coef[(base + c, i)])
    }

    /// Companion matrix of the lag polynomial, `kp x kp`.
    pub fn companion(&self) -> DMatrix<f64> {
        let k = self.k();
        let p = self.spec.p;
        let mut comp = DMatrix::zeros(k * p, k * p);
        for lag in 1..=p {
            comp.view_mut((0, (lag - 1) * k), (k, k)).copy_from(&self.a(lag));
        }
        for i in k..k * p {
            comp[(i, i - k)] = 1.0;
        }
        comp
    }

    /// Largest companion eigenvalue modulus; `< 1` means a stable fit.
    pub fn max_eigen_modulus(&self) -> f64 {
        self.companion()
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_stable(&self) -> bool {
        self.max_eigen_modulus() < 1.0
    }

    /// Coefficient tables as CSV with columns
    /// `equation,variable,estimate,std_error,t_value,p_value`.
    pub fn coef_table_csv(&self) -> Vec<String> {
        let mut lines = vec!["equation,variable,estimate,std_error,t_value,p_value".to_string()];
        for eq in &self.table {
            for row in &eq.rows {
                lines.push(format!(
                    "{},{},{},{},{},{}",
                    eq.equation,
                    row.variable,
                    format_float(row.estimate),
                    format_float(row.std_error),
                    format_float(row.t_value),
                    format_float(row.p_value)
                ));
            }
        }
        lines
    }
}

/// Shared response/design pair for every equation of a VAR.
pub(crate) struct VarDesign {
    pub y: DMatrix<f64>,
    pub x: DMatrix<f64>,
    pub regressor_names: Vec<String>,
}

/// Build the stacked design with responses at dataset rows `offset..T`.
///
/// `offset >= spec.p` so every lag is observable; `select_lag` passes
/// `offset = pmax` to put all candidate orders on a common sample.
pub(crate) fn build_design(d: &Dataset, spec: VarSpec, offset: usize) -> Result<VarDesign> {
    let t = d.len();
    let k = d.n_columns();
    if offset < spec.p {
        return Err(VarError::InvalidSpec(format!(
            "design offset {offset} below lag order {}",
            spec.p
        )));
    }
    if t <= offset {
        return Err(VarError::InsufficientSample {
            needed: offset + 1,
            got: t,
        });
    }
    let n = t - offset;
    let m = spec.n_regressors(k);
    let cols = d.columns();

    let y = DMatrix::from_fn(n, k, |i, j| cols[j].values()[offset + i]);
    let mut x = DMatrix::zeros(n, m);
    let mut names = Vec::with_capacity(m);
    for lag in 1..=spec.p {
        for (j, c) in cols.iter().enumerate() {
            let col = (lag - 1) * k + j;
            for i in 0..n {
                x[(i, col)] = c.values()[offset + i - lag];
            }
            names.push(format!("{}.l{lag}", c.name()));
        }
    }
    let mut det = k * spec.p;
    if spec.constant {
        for i in 0..n {
            x[(i, det)] = 1.0;
        }
        names.push("const".to_string());
        det += 1;
    }
    for season in 1..=spec.seasonal_dummies {
        for i in 0..n {
            let month = d.month_at(offset + i).month() as usize;
            let ind = if month == season { 1.0 } else { 0.0 };
            x[(i, det)] = ind - 1.0 / SEASON_LENGTH as f64;
        }
        names.push(format!("sd{season}"));
        det += 1;
    }
    Ok(VarDesign {
        y,
        x,
        regressor_names: names,
    })
}

/// Equation-by-equation least squares with per-equation t-tables.
pub fn fit_var(d: &Dataset, spec: VarSpec) -> Result<VarFit> {
    let k = d.n_columns();
    if k == 0 {
        return Err(VarError::InvalidSpec("empty dataset".into()));
    }
    let m = spec.n_regressors(k);
    let t = d.len();
    if t <= spec.p || t - spec.p <= m {
        return Err(VarError::InsufficientSample {
            needed: spec.p + m + 1,
            got: t,
        });
    }
    let design = build_design(d, spec, spec.p)?;
    fit_from_design(d, spec, design)
}

fn fit_from_design(d: &Dataset, spec: VarSpec, design: VarDesign) -> Result<VarFit> {
    let k = design.y.ncols();
    let n = design.y.nrows();
    let m = design.x.ncols();
    let (coef, residuals, xtx_inv) = ols_multi(&design.y, &design.x)
        .map_err(|e| VarError::Singular(format!("VAR design: {e}")))?;

    let cross = residuals.transpose() * &residuals;
    let df = (n - m) as f64;
    let sigma_u = &cross / df;
    let sigma_ml = &cross / n as f64;

    let log_det = positive_log_det(&sigma_ml)?;
    let criteria = InfoCriteria::from_parts(log_det, n, m, k);
    let nk = (n * k) as f64;
    let loglik = -0.5 * nk * (2.0 * std::f64::consts::PI).ln() - 0.5 * n as f64 * log_det - 0.5 * nk;

    let tdist = StudentsT::new(0.0, 1.0, df)
        .map_err(|e| VarError::InvalidParam(format!("t distribution: {e}")))?;
    let mut table = Vec::with_capacity(k);
    for (eq, name) in d.names().iter().enumerate() {
        let sigma2 = cross[(eq, eq)] / df;
        let mut rows = Vec::with_capacity(m);
        for r in 0..m {
            let estimate = coef[(r, eq)];
            let std_error = (sigma2 * xtx_inv[(r, r)]).sqrt();
            let t_value = estimate / std_error;
            let p_value = 2.0 * (1.0 - tdist.cdf(t_value.abs()));
            rows.push(CoefRow {
                variable: design.regressor_names[r].clone(),
                estimate,
                std_error,
                t_value,
                p_value,
            });
        }
        table.push(EquationTable {
            equation: (*name).to_string(),
            rows,
            resid_se: sigma2.sqrt(),
        });
    }

    Ok(VarFit {
        spec,
        var_names: d.names().iter().map(|s| (*s).to_string()).collect(),
        regressor_names: design.regressor_names,
        coef,
        residuals,
        sigma_u,
        sigma_ml,
        nobs: n,
        loglik,
        criteria,
        table,
        xtx_inv,
    })
}

/// `ln det` via Cholesky, erroring when the matrix is not positive definite.
fn positive_log_det(sigma: &DMatrix<f64>) -> Result<f64> {
    let chol = sigma
        .clone()
        .cholesky()
        .ok_or_else(|| VarError::Singular("residual covariance is not positive definite".into()))?;
    Ok(2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>())
}

/// Pick the lag order in `1..=pmax` minimizing `criterion` on the common
/// sample that starts at row `pmax` (constant included, no dummies; ties go
/// to the smaller order).
pub fn select_lag(d: &Dataset, pmax: usize, criterion: LagCriterion) -> Result<usize> {
    if pmax == 0 {
        return Err(VarError::InvalidSpec("pmax must be >= 1".into()));
    }
    let k = d.n_columns();
    if k == 0 {
        return Err(VarError::InvalidSpec("empty dataset".into()));
    }
    let spec_max = VarSpec::with_constant(pmax)?;
    let m_max = spec_max.n_regressors(k);
    let t = d.len();
    let n = t.saturating_sub(pmax);
    if n < 10 * m_max {
        return Err(VarError::InsufficientSample {
            needed: pmax + 10 * m_max,
            got: t,
        });
    }
    // The lag-major column layout makes the lag-p design the first k*p
    // columns of the lag-pmax design plus the deterministic tail.
    let full = build_design(d, spec_max, pmax)?;
    let mut best: Option<(f64, usize)> = None;
    for p in 1..=pmax {
        let m = k * p + 1;
        let mut x = DMatrix::zeros(n, m);
        x.view_mut((0, 0), (n, k * p))
            .copy_from(&full.x.view((0, 0), (n, k * p)));
        x.view_mut((0, k * p), (n, 1))
            .copy_from(&full.x.view((0, k * pmax), (n, 1)));
        let (_, resid, _) = ols_multi(&full.y, &x)
            .map_err(|e| VarError::Singular(format!("lag {p} design: {e}")))?;
        let sigma_ml = resid.transpose() * &resid / n as f64;
        let log_det = positive_log_det(&sigma_ml)?;
        let value = InfoCriteria::from_parts(log_det, n, m, k).value(criterion);
        if best.map_or(true, |(b, _)| value < b) {
            best = Some((value, p));
        }
    }
    Ok(best.expect("pmax >= 1 guarantees a candidate").1)
}
