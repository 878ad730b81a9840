use boombust_core::Dataset;
use nalgebra::DMatrix;

use crate::error::{Result, VarError};
use crate::tables::{builtin_trace_cv, MAX_DIMENSION};

/// One rank hypothesis of the trace test.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct TraceRow {
    /// Hypothesized rank `r` (H0: rank <= r).
    pub rank_hypothesis: usize,
    pub stat: f64,
    pub cv_90: f64,
    pub cv_95: f64,
    pub cv_99: f64,
}

/// Johansen trace test under an unrestricted constant.
#[derive(Debug, Clone)]
pub struct JohansenResult {
    /// Deterministic-term case of the embedded critical values.
    pub case: &'static str,
    /// Lag order of the levels VAR the test is built from.
    pub p: usize,
    /// Usable observations `T - p`.
    pub nobs: usize,
    /// Squared canonical correlations, descending, each in `[0, 1)`.
    pub eigenvalues: Vec<f64>,
    /// Trace statistics for `r = 0..K-1`; nonincreasing in `r`.
    pub trace: Vec<TraceRow>,
    /// First non-rejected rank at the 5% level (`K` when all reject).
    pub rank: usize,
}

/// Reduced-rank pieces shared by the trace test and the VECM fit.
pub(crate) struct ReducedRank {
    /// Squared canonical correlations, descending.
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors as columns, Johansen-normalized (`v' S11 v = I`), in the
    /// order of `eigenvalues`.
    pub beta: DMatrix<f64>,
    /// Differences `dY_t` (responses).
    pub z0: DMatrix<f64>,
    /// Lagged levels `Y_{t-1}`.
    pub z1: DMatrix<f64>,
    /// Lagged differences and the constant.
    pub z2: DMatrix<f64>,
    pub n: usize,
}

/// Build the concentrated eigenproblem of the Johansen procedure for a
/// levels VAR(p) with unrestricted constant.
pub(crate) fn reduced_rank(d: &Dataset, p: usize) -> Result<ReducedRank> {
    if p == 0 {
        return Err(VarError::InvalidSpec("lag order p must be >= 1".into()));
    }
    let k = d.n_columns();
    let t = d.len();
    let z2_cols = k * (p - 1) + 1;
    if t <= p || t - p <= z2_cols + k {
        return Err(VarError::InsufficientSample {
            needed: p + z2_cols + k + 1,
            got: t,
        });
    }
    let n = t - p;
    let cols = d.columns();
    let dy = |row: usize, j: usize| cols[j].values()[row] - cols[j].values()[row - 1];

    let z0 = DMatrix::from_fn(n, k, |i, j| dy(p + i, j));
    let z1 = DMatrix::from_fn(n, k, |i, j| cols[j].values()[p + i - 1]);
    let mut z2 = DMatrix::zeros(n, z2_cols);
    for lag in 1..p {
        for j in 0..k {
            for i in 0..n {
                z2[(i, (lag - 1) * k + j)] = dy(p + i - lag, j);
            }
        }
    }
    for i in 0..n {
        z2[(i, z2_cols - 1)] = 1.0;
    }

    // Partial out Z2 from both blocks.
    let z2t = z2.transpose();
    let gram = &z2t * &z2;
    let chol = gram
        .cholesky()
        .ok_or_else(|| VarError::Singular("Johansen: short-run regressor moment matrix".into()))?;
    let r0 = &z0 - &z2 * chol.solve(&(&z2t * &z0));
    let r1 = &z1 - &z2 * chol.solve(&(&z2t * &z1));

    let nf = n as f64;
    let s00 = r0.transpose() * &r0 / nf;
    let s11 = r1.transpose() * &r1 / nf;
    let s01 = r0.transpose() * &r1 / nf;

    let c00 = s00
        .cholesky()
        .ok_or_else(|| VarError::Singular("Johansen: S00 not positive definite".into()))?;
    let c11 = s11
        .cholesky()
        .ok_or_else(|| VarError::Singular("Johansen: S11 not positive definite".into()))?;
    // H = S10 S00^{-1} S01, then M = L11^{-1} H L11^{-T} (symmetric).
    let h = s01.transpose() * c00.solve(&s01);
    let l11 = c11.l();
    let z = l11
        .solve_lower_triangular(&h)
        .ok_or_else(|| VarError::Singular("Johansen: triangular solve".into()))?;
    let m_raw = l11
        .solve_lower_triangular(&z.transpose())
        .ok_or_else(|| VarError::Singular("Johansen: triangular solve".into()))?
        .transpose();
    let m_sym = (&m_raw + m_raw.transpose()) * 0.5;

    let eig = m_sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());

    let mut eigenvalues = Vec::with_capacity(k);
    let mut u = DMatrix::zeros(k, k);
    for (pos, &idx) in order.iter().enumerate() {
        eigenvalues.push(eig.eigenvalues[idx].clamp(0.0, 1.0 - 1e-12));
        u.set_column(pos, &eig.eigenvectors.column(idx));
    }
    // Back-transform: beta = L11^{-T} u, so beta' S11 beta = I.
    let beta = l11
        .transpose()
        .solve_upper_triangular(&u)
        .ok_or_else(|| VarError::Singular("Johansen: triangular solve".into()))?;

    Ok(ReducedRank {
        eigenvalues,
        beta,
        z0,
        z1,
        z2,
        n,
    })
}

/// Trace test for the cointegration rank of the columns of `d`, levels
/// VAR(p), unrestricted constant, embedded simulated critical values.
pub fn johansen_trace(d: &Dataset, p: usize) -> Result<JohansenResult> {
    let k = d.n_columns();
    if !(2..=MAX_DIMENSION).contains(&k) {
        return Err(VarError::UnsupportedDimension(format!(
            "trace test covers 2..={MAX_DIMENSION} variables, got {k}"
        )));
    }
    let core = reduced_rank(d, p)?;
    let table = builtin_trace_cv()?;
    let n = core.n as f64;

    let mut trace = Vec::with_capacity(k);
    let mut rank = k;
    for r in 0..k {
        let stat: f64 = core.eigenvalues[r..]
            .iter()
            .map(|lam| -n * (1.0 - lam).ln())
            .sum();
        let cv = table.cv(k - r)?;
        if rank == k && stat < cv.q95 {
            rank = r;
        }
        trace.push(TraceRow {
            rank_hypothesis: r,
            stat,
            cv_90: cv.q90,
            cv_95: cv.q95,
            cv_99: cv.q99,
        });
    }
    Ok(JohansenResult {
        case: "unrestricted constant",
        p,
        nobs: core.n,
        eigenvalues: core.eigenvalues,
        trace,
        rank,
    })
}
