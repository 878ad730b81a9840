use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Result, VarError};

/// Largest system dimension covered by the embedded trace critical values.
pub const MAX_DIMENSION: usize = 3;

/// Trace-statistic critical values for one number of common trends.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TraceCvRow {
    /// Number of common trends `K - r` under the rank hypothesis.
    pub dim: usize,
    pub q90: f64,
    pub q95: f64,
    pub q99: f64,
}

/// Simulated critical values of the Johansen trace statistic with the
/// provenance of the one-time simulation. The estimation sweeps out an
/// unrestricted constant and the common trends are simulated driftless
/// (demeaned-Brownian functionals), the convention for monthly series with
/// no material linear trend.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceCvTable {
    /// Deterministic-term case the quantiles were simulated under.
    pub case: String,
    /// Monte-Carlo replications per dimension.
    pub reps: u32,
    /// Brownian-motion discretization steps.
    pub grid: usize,
    pub seed: u64,
    /// Command line that regenerates the table byte for byte.
    pub note: String,
    pub rows: Vec<TraceCvRow>,
}

impl TraceCvTable {
    pub fn from_json(raw: &str) -> Result<Self> {
        let table: Self = serde_json::from_str(raw)?;
        table.validate()?;
        Ok(table)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    fn validate(&self) -> Result<()> {
        for dim in 1..=MAX_DIMENSION {
            let row = self.cv(dim)?;
            if !(row.q90 < row.q95 && row.q95 < row.q99) {
                return Err(VarError::InvalidParam(format!(
                    "trace critical values for dim {dim} are not increasing"
                )));
            }
        }
        Ok(())
    }

    /// Critical values for `dim` common trends.
    pub fn cv(&self, dim: usize) -> Result<&TraceCvRow> {
        self.rows
            .iter()
            .find(|r| r.dim == dim)
            .ok_or_else(|| VarError::UnsupportedDimension(format!(
                "no embedded trace critical values for {dim} common trends (max {MAX_DIMENSION})"
            )))
    }
}

static BUILTIN: OnceLock<std::result::Result<TraceCvTable, String>> = OnceLock::new();

/// The embedded trace critical values, simulated once by `gen_johansen_cv`.
pub fn builtin_trace_cv() -> Result<&'static TraceCvTable> {
    let table = BUILTIN.get_or_init(|| {
        TraceCvTable::from_json(include_str!("../tables/johansen_trace.json"))
            .map_err(|e| e.to_string())
    });
    table
        .as_ref()
        .map_err(|e| VarError::InvalidParam(format!("embedded trace table: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_table_loads_with_provenance() {
        let table = builtin_trace_cv().unwrap();
        assert_eq!(table.case, "unrestricted constant");
        assert!(table.reps >= 100_000);
        assert!(table.seed > 0);
        assert!(table.note.contains("gen_johansen_cv"));
        assert_eq!(table.rows.len(), MAX_DIMENSION);
    }

    #[test]
    fn quantiles_increase_in_level_and_dimension() {
        let table = builtin_trace_cv().unwrap();
        for dim in 1..=MAX_DIMENSION {
            let row = table.cv(dim).unwrap();
            assert!(row.q90 < row.q95 && row.q95 < row.q99);
            if dim > 1 {
                let prev = table.cv(dim - 1).unwrap();
                assert!(row.q95 > prev.q95);
            }
        }
        assert!(table.cv(4).is_err());
    }

    #[test]
    fn quantiles_sit_on_the_demeaned_brownian_limit() {
        // Long-established quantiles of the demeaned-Brownian trace law:
        // one trend has its 95/99% points near 8.18/11.65, two trends near
        // 17.95/23.52, three near 31.5/37.5. The embedded simulation must
        // reproduce them within Monte-Carlo and discretization error.
        let table = builtin_trace_cv().unwrap();
        let one = table.cv(1).unwrap();
        assert!((one.q95 - 8.18).abs() < 0.30, "q95 = {}", one.q95);
        assert!((one.q99 - 11.65).abs() < 0.60, "q99 = {}", one.q99);
        let two = table.cv(2).unwrap();
        assert!((two.q95 - 17.95).abs() < 0.50, "q95 = {}", two.q95);
        let three = table.cv(3).unwrap();
        assert!((three.q95 - 31.5).abs() < 0.80, "q95 = {}", three.q95);
    }
}
