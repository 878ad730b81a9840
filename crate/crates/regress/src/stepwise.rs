use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::design::Design;
use crate::error::Result;
use crate::logit::{fit_logit, LogitFit};

/// One elimination step: the feature dropped and the likelihood-ratio
/// p-value that justified dropping it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub dropped: String,
    pub p_value: f64,
}

/// Outcome of backward stepwise selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepwiseFit {
    /// Indices of the surviving features in the original design.
    pub kept: Vec<usize>,
    pub kept_names: Vec<String>,
    /// Final fit on the surviving features.
    pub fit: LogitFit,
    pub trace: Vec<StepRecord>,
}

/// Likelihood-ratio p-value for dropping one feature from a fitted model.
fn drop_p_value(full_ll: f64, reduced_ll: f64) -> f64 {
    let chi1 = ChiSquared::new(1.0).expect("χ²(1)");
    let stat = (2.0 * (full_ll - reduced_ll)).max(0.0);
    1.0 - chi1.cdf(stat)
}

/// Backward stepwise selection by likelihood-ratio tests: repeatedly drop
/// the feature with the largest p-value above `p_out` (testing each fitted
/// model against the nested model without that feature) until every
/// survivor is significant at `p_out`. May end at the intercept-only model.
pub fn backward_stepwise(d: &Design, p_out: f64) -> Result<StepwiseFit> {
    let mut kept: Vec<usize> = (0..d.p()).collect();
    let mut current = d.clone();
    let mut fit = fit_logit(&current)?;
    let mut trace = Vec::new();
    while !kept.is_empty() {
        let mut worst: Option<(usize, f64)> = None;
        for drop_pos in 0..kept.len() {
            let remaining: Vec<usize> =
                (0..kept.len()).filter(|&k| k != drop_pos).collect();
            let reduced = fit_logit(&current.select(&remaining)?)?;
            let p = drop_p_value(fit.loglik, reduced.loglik);
            if worst.map_or(true, |(_, wp)| p > wp) {
                worst = Some((drop_pos, p));
            }
        }
        let (drop_pos, p) = worst.expect("nonempty feature set");
        if p <= p_out {
            break;
        }
        trace.push(StepRecord { dropped: current.names()[drop_pos].clone(), p_value: p });
        let remaining: Vec<usize> = (0..kept.len()).filter(|&k| k != drop_pos).collect();
        current = current.select(&remaining)?;
        kept.remove(drop_pos);
        fit = fit_logit(&current)?;
    }
    Ok(StepwiseFit {
        kept_names: kept.iter().map(|&j| d.names()[j].clone()).collect(),
        kept,
        fit,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insignificant_feature_is_eliminated() {
        // One strong signal, one pure-noise column on a deterministic grid.
        let rows: Vec<Vec<f64>> = (0..200)
            .map(|i| {
                let s = ((i * 31) % 21) as f64 / 10.0 - 1.0;
                let noise = ((i * 17) % 23) as f64 / 11.0 - 1.0;
                vec![s, noise]
            })
            .collect();
        let y: Vec<u8> = rows
            .iter()
            .enumerate()
            .map(|(i, r)| u8::from(2.5 * r[0] + (((i * 41) % 19) as f64 / 9.5 - 1.0) > 0.0))
            .collect();
        let d = Design::new(&["signal", "noise"], rows, y).unwrap();
        let sel = backward_stepwise(&d, 0.05).unwrap();
        assert_eq!(sel.kept_names, vec!["signal".to_string()]);
        assert_eq!(sel.kept, vec![0]);
        assert_eq!(sel.trace.len(), 1);
        assert_eq!(sel.trace[0].dropped, "noise");
        assert!(sel.trace[0].p_value > 0.05);
    }

    #[test]
    fn threshold_extremes_keep_everything_or_nothing() {
        let rows: Vec<Vec<f64>> = (0..60)
            .map(|i| vec![((i * 7) % 11) as f64, ((i * 13) % 17) as f64])
            .collect();
        let y: Vec<u8> = (0..60).map(|i| u8::from((i * 29) % 2 == 0)).collect();
        let d = Design::new(&["a", "b"], rows, y).unwrap();
        // p <= 1 always holds, so no feature can be dropped.
        let keep_all = backward_stepwise(&d, 1.0).unwrap();
        assert_eq!(keep_all.kept.len(), 2);
        assert!(keep_all.trace.is_empty());
        // p > 0 almost surely, so everything goes; the result is the
        // intercept-only model.
        let drop_all = backward_stepwise(&d, 0.0).unwrap();
        assert!(drop_all.kept.is_empty());
        assert!(drop_all.fit.slopes.is_empty());
        assert_eq!(drop_all.trace.len(), 2);
    }
}
