use serde::{Deserialize, Serialize};

use crate::CpmError;

/// The supported target average run lengths (precomputed threshold grid).
pub const ARL0_GRID: [u32; 4] = [100, 500, 1000, 5000];

/// Monitoring statistic. Only the Kolmogorov-Smirnov statistic is provided;
/// the field exists so configurations are explicit and serializable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    #[default]
    Ks,
}

/// Configuration of the sequential change-point monitor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CpmConfig {
    /// Target average run length under the null, in observations.
    pub arl0: u32,
    /// Observations consumed before monitoring begins (no alarms at
    /// `t <= burn_in`).
    pub burn_in: u32,
    /// Monitoring statistic (fixed to KS).
    #[serde(default)]
    pub statistic: Statistic,
}

impl CpmConfig {
    /// Build a validated configuration. `arl0` must lie on [`ARL0_GRID`];
    /// `burn_in` must be at least 4.
    pub fn new(arl0: u32, burn_in: u32) -> Result<Self, CpmError> {
        if !ARL0_GRID.contains(&arl0) {
            return Err(CpmError::UnsupportedArl0(arl0));
        }
        if burn_in < 4 {
            return Err(CpmError::BurnInTooSmall(burn_in));
        }
        Ok(Self {
            arl0,
            burn_in,
            statistic: Statistic::Ks,
        })
    }

    /// The default monitor: ARL 500 with a startup window of 20 observations.
    pub fn default_monitoring() -> Self {
        Self::new(500, 20).expect("grid values")
    }
}

/// Parameters of the fitted slow-growth tail used beyond the exactly
/// calibrated range: `h_t = a + b * sqrt(ln ln t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailInfo {
    pub a: f64,
    pub b: f64,
    /// First `t` the fit was estimated from.
    pub fit_from: u32,
    /// Constant shift applied after an average-run-length measurement
    /// (0 when no adjustment was needed).
    pub shift: f64,
}

/// Per-`t` alarm thresholds `h_t` with calibration provenance.
///
/// `thresholds[i]` is the threshold at `t = burn_in + 1 + i`; no alarms are
/// possible at `t <= burn_in`. Thresholds are exact conditional-quantile
/// estimates up to `exact_until` and follow the fitted tail beyond it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdTable {
    pub arl0: u32,
    pub burn_in: u32,
    pub horizon: u32,
    /// Number of null streams used in calibration.
    pub reps: u32,
    pub seed: u64,
    /// Largest `t` with an exactly calibrated conditional quantile.
    pub exact_until: u32,
    pub tail: TailInfo,
    /// Mean run length measured on held-out null streams, when recorded.
    pub measured_arl: Option<f64>,
    /// Free-form provenance note (generator command line and the like).
    pub note: String,
    thresholds: Vec<f64>,
}

impl ThresholdTable {
    /// Assemble and validate a table. `thresholds[i]` maps to
    /// `t = burn_in + 1 + i` and must cover `burn_in + 1 ..= horizon`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        arl0: u32,
        burn_in: u32,
        horizon: u32,
        thresholds: Vec<f64>,
        reps: u32,
        seed: u64,
        exact_until: u32,
        tail: TailInfo,
        measured_arl: Option<f64>,
        note: String,
    ) -> Result<Self, CpmError> {
        let table = Self {
            arl0,
            burn_in,
            horizon,
            reps,
            seed,
            exact_until,
            tail,
            measured_arl,
            note,
            thresholds,
        };
        table.validate()?;
        Ok(table)
    }

    pub fn validate(&self) -> Result<(), CpmError> {
        if !ARL0_GRID.contains(&self.arl0) {
            return Err(CpmError::UnsupportedArl0(self.arl0));
        }
        if self.horizon < 10_000 {
            return Err(CpmError::InvalidTable(format!(
                "horizon {} below the minimum of 10000",
                self.horizon
            )));
        }
        let needed = (self.horizon - self.burn_in) as usize;
        if self.thresholds.len() != needed {
            return Err(CpmError::InvalidTable(format!(
                "{} thresholds cannot cover t = {}..={}",
                self.thresholds.len(),
                self.burn_in + 1,
                self.horizon
            )));
        }
        if let Some(bad) = self
            .thresholds
            .iter()
            .find(|h| !h.is_finite() || **h <= 0.0)
        {
            return Err(CpmError::InvalidTable(format!(
                "non-positive or non-finite threshold {bad}"
            )));
        }
        Ok(())
    }

    /// Threshold at segment length `t`: `None` inside the startup window,
    /// an error past the horizon.
    pub fn threshold(&self, t: usize) -> Result<Option<f64>, CpmError> {
        if t <= self.burn_in as usize {
            return Ok(None);
        }
        if t > self.horizon as usize {
            return Err(CpmError::HorizonExhausted {
                t,
                horizon: self.horizon,
            });
        }
        Ok(Some(self.thresholds[t - self.burn_in as usize - 1]))
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    /// Unvalidated constructor for in-crate tests (small horizons).
    #[cfg(test)]
    pub(crate) fn for_tests(
        arl0: u32,
        burn_in: u32,
        horizon: u32,
        thresholds: Vec<f64>,
    ) -> Self {
        Self {
            arl0,
            burn_in,
            horizon,
            reps: 1000,
            seed: 0,
            exact_until: horizon,
            tail: TailInfo {
                a: 1.0,
                b: 0.0,
                fit_from: burn_in + 1,
                shift: 0.0,
            },
            measured_arl: None,
            note: "test".into(),
            thresholds,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("table serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, CpmError> {
        let table: Self = serde_json::from_str(s)?;
        table.validate()?;
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_table() -> ThresholdTable {
        ThresholdTable::from_parts(
            100,
            4,
            10_000,
            vec![2.0; 9_996],
            1000,
            7,
            500,
            TailInfo {
                a: 2.0,
                b: 0.0,
                fit_from: 300,
                shift: 0.0,
            },
            None,
            "test".into(),
        )
        .unwrap()
    }

    #[test]
    fn config_enforces_grid_and_burn_in() {
        assert!(CpmConfig::new(500, 20).is_ok());
        assert!(matches!(
            CpmConfig::new(200, 20),
            Err(CpmError::UnsupportedArl0(200))
        ));
        assert!(matches!(
            CpmConfig::new(100, 3),
            Err(CpmError::BurnInTooSmall(3))
        ));
    }

    #[test]
    fn threshold_lookup_respects_burn_in_and_horizon() {
        let t = tiny_table();
        assert_eq!(t.threshold(1).unwrap(), None);
        assert_eq!(t.threshold(4).unwrap(), None);
        assert_eq!(t.threshold(5).unwrap(), Some(2.0));
        assert_eq!(t.threshold(10_000).unwrap(), Some(2.0));
        assert!(matches!(
            t.threshold(10_001),
            Err(CpmError::HorizonExhausted { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let t = tiny_table();
        let s = t.to_json();
        let back = ThresholdTable::from_json(&s).unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn validation_rejects_bad_tables() {
        assert!(ThresholdTable::from_parts(
            100,
            4,
            9_999, // horizon below the floor
            vec![2.0; 9_995],
            1000,
            7,
            500,
            TailInfo { a: 2.0, b: 0.0, fit_from: 300, shift: 0.0 },
            None,
            String::new(),
        )
        .is_err());
        assert!(ThresholdTable::from_parts(
            100,
            4,
            10_000,
            vec![-1.0; 9_996], // negative thresholds
            1000,
            7,
            500,
            TailInfo { a: 2.0, b: 0.0, fit_from: 300, shift: 0.0 },
            None,
            String::new(),
        )
        .is_err());
    }
}
