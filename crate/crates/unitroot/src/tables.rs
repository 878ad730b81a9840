//! Finite-sample critical values for the plain ADF and KPSS tests, embedded
//! from a one-time null simulation (`gen_unitroot_tables`) whose seed and
//! replication count ship inside the JSON. Requested sample sizes are
//! interpolated linearly in `1/T` between grid points and clamped at the
//! grid edges.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::Deserialize;

use crate::adf::Deterministic;
use crate::kpss::KpssDeterministic;

#[derive(Debug, Deserialize)]
pub(crate) struct EmbeddedCvFile {
    pub reps: u32,
    pub seed: u64,
    pub note: String,
    /// Quantile levels, one per value column.
    pub levels: Vec<f64>,
    pub t_grid: Vec<usize>,
    /// `values[case][t_index][level_index]`.
    pub values: BTreeMap<String, Vec<Vec<f64>>>,
}

impl EmbeddedCvFile {
    fn check(&self, name: &str, cases: &[&str]) -> &Self {
        assert!(self.reps >= 500, "{name}: embedded table has too few replications");
        assert!(!self.t_grid.is_empty(), "{name}: empty T grid");
        assert!(self.t_grid.windows(2).all(|w| w[0] < w[1]), "{name}: T grid not increasing");
        let _ = self.seed;
        let _ = &self.note;
        for case in cases {
            let rows = self
                .values
                .get(*case)
                .unwrap_or_else(|| panic!("{name}: missing case '{case}'"));
            assert_eq!(rows.len(), self.t_grid.len(), "{name}: grid shape mismatch");
            for row in rows {
                assert_eq!(row.len(), self.levels.len(), "{name}: level shape mismatch");
            }
        }
        self
    }

    /// Interpolate the value row for sample size `t` within one case.
    fn row_at(&self, case: &str, t: usize) -> Vec<f64> {
        let rows = &self.values[case];
        let grid = &self.t_grid;
        if t <= grid[0] {
            return rows[0].clone();
        }
        if t >= *grid.last().unwrap() {
            return rows.last().unwrap().clone();
        }
        let hi = grid.partition_point(|g| *g < t);
        let (t_lo, t_hi) = (grid[hi - 1] as f64, grid[hi] as f64);
        let x = t as f64;
        let w = (1.0 / x - 1.0 / t_hi) / (1.0 / t_lo - 1.0 / t_hi);
        rows[hi - 1]
            .iter()
            .zip(&rows[hi])
            .map(|(lo, hi)| w * lo + (1.0 - w) * hi)
            .collect()
    }
}

fn adf_file() -> &'static EmbeddedCvFile {
    static FILE: OnceLock<EmbeddedCvFile> = OnceLock::new();
    FILE.get_or_init(|| {
        let file: EmbeddedCvFile = serde_json::from_str(include_str!("../tables/adf_cv.json"))
            .expect("embedded ADF critical-value table is malformed");
        file.check("adf_cv", &["none", "constant", "constant_trend"]);
        file
    })
}

fn kpss_file() -> &'static EmbeddedCvFile {
    static FILE: OnceLock<EmbeddedCvFile> = OnceLock::new();
    FILE.get_or_init(|| {
        let file: EmbeddedCvFile = serde_json::from_str(include_str!("../tables/kpss_cv.json"))
            .expect("embedded KPSS critical-value table is malformed");
        file.check("kpss_cv", &["level", "trend"]);
        file
    })
}

/// `(lower-tail, upper-tail)` ADF critical values at significance levels
/// 1%, 5%, 10% for a series of length `t`.
///
/// The embedded level order is `[0.01, 0.05, 0.10, 0.90, 0.95, 0.99]`; the
/// upper-tail array is returned in significance order (1% first), i.e.
/// quantiles `[0.99, 0.95, 0.90]`.
pub(crate) fn adf_crit(det: Deterministic, t: usize) -> ([f64; 3], [f64; 3]) {
    let row = adf_file().row_at(det.label(), t);
    ([row[0], row[1], row[2]], [row[5], row[4], row[3]])
}

/// Upper-tail KPSS critical values at significance levels 10%, 5%, 2.5%, 1%
/// (quantiles 0.90, 0.95, 0.975, 0.99) for a series of length `t`.
pub(crate) fn kpss_crit(det: KpssDeterministic, t: usize) -> [f64; 4] {
    let row = kpss_file().row_at(det.label(), t);
    [row[0], row[1], row[2], row[3]]
}

/// Provenance of the embedded tables: `(reps, seed, note)` for ADF and KPSS
/// respectively, surfaced so reports can cite how shipped constants were
/// produced.
pub fn embedded_provenance() -> [(u32, u64, String); 2] {
    let a = adf_file();
    let k = kpss_file();
    [(a.reps, a.seed, a.note.clone()), (k.reps, k.seed, k.note.clone())]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_is_exact_on_grid_points_and_clamped_outside() {
        let file = adf_file();
        let t0 = file.t_grid[0];
        let row0 = file.row_at("constant", t0);
        assert_eq!(row0, file.values["constant"][0]);
        assert_eq!(file.row_at("constant", t0 - 5), row0);
        let last = *file.t_grid.last().unwrap();
        assert_eq!(file.row_at("constant", last + 1000), *file.values["constant"].last().unwrap());
        // Between grid points the value lies between the bracketing rows.
        let mid = (file.t_grid[2] + file.t_grid[3]) / 2;
        let row = file.row_at("constant", mid);
        for (i, v) in row.iter().enumerate() {
            let (a, b) = (file.values["constant"][2][i], file.values["constant"][3][i]);
            assert!(*v >= a.min(b) - 1e-12 && *v <= a.max(b) + 1e-12);
        }
    }

    #[test]
    fn embedded_quantiles_are_level_monotone() {
        for det in [Deterministic::None, Deterministic::Constant, Deterministic::ConstantTrend] {
            for t in [25, 60, 100, 300, 700, 2000] {
                let (left, right) = adf_crit(det, t);
                assert!(left[0] <= left[1] && left[1] <= left[2], "{det:?} T={t}");
                assert!(right[0] >= right[1] && right[1] >= right[2], "{det:?} T={t}");
                assert!(left[2] < right[2], "{det:?} T={t}: tails out of order");
            }
        }
        for det in [KpssDeterministic::Level, KpssDeterministic::Trend] {
            for t in [25, 100, 500, 2000] {
                let c = kpss_crit(det, t);
                assert!(c[0] <= c[1] && c[1] <= c[2] && c[2] <= c[3], "{det:?} T={t}");
                assert!(c[0] > 0.0);
            }
        }
    }

    #[test]
    fn kpss_large_sample_values_match_classical_asymptotics() {
        // Level case: 0.347 / 0.463 / 0.574 / 0.739; trend case:
        // 0.119 / 0.146 / 0.176 / 0.216 (10%, 5%, 2.5%, 1%).
        let level = kpss_crit(KpssDeterministic::Level, 2000);
        for (got, want) in level.iter().zip([0.347, 0.463, 0.574, 0.739]) {
            assert!((got - want).abs() < 0.03, "level: got {got}, want {want}");
        }
        let trend = kpss_crit(KpssDeterministic::Trend, 2000);
        for (got, want) in trend.iter().zip([0.119, 0.146, 0.176, 0.216]) {
            assert!((got - want).abs() < 0.015, "trend: got {got}, want {want}");
        }
    }

    #[test]
    fn adf_large_sample_values_match_classical_asymptotics() {
        // Lower-tail 1%/5%/10% quantiles of the Dickey-Fuller distributions:
        // no deterministics -2.58/-1.95/-1.62; constant -3.43/-2.86/-2.57;
        // constant+trend -3.96/-3.41/-3.13.
        let cases = [
            (Deterministic::None, [-2.58, -1.95, -1.62]),
            (Deterministic::Constant, [-3.43, -2.86, -2.57]),
            (Deterministic::ConstantTrend, [-3.96, -3.41, -3.13]),
        ];
        for (det, want) in cases {
            let (left, _) = adf_crit(det, 2000);
            for (g, w) in left.iter().zip(want) {
                assert!((g - w).abs() < 0.06, "{det:?}: got {g}, want {w}");
            }
        }
    }
}
