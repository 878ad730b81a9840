use serde::{Deserialize, Serialize};

use crate::design::Design;
use crate::enet::EnetFit;
use crate::error::{RegressError, Result};
use crate::logit::LogitFit;

/// 2×2 classification counts, indexed `[predicted][reference]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    counts: [[u64; 2]; 2],
}

impl ConfusionMatrix {
    pub fn new(counts: [[u64; 2]; 2]) -> Self {
        Self { counts }
    }

    pub fn from_labels(predicted: &[u8], reference: &[u8]) -> Result<Self> {
        if predicted.len() != reference.len() {
            return Err(RegressError::InvalidDesign(format!(
                "{} predictions vs {} references",
                predicted.len(),
                reference.len()
            )));
        }
        if predicted.iter().chain(reference).any(|&v| v > 1) {
            return Err(RegressError::InvalidDesign("labels must be 0 or 1".into()));
        }
        let mut counts = [[0u64; 2]; 2];
        for (&p, &r) in predicted.iter().zip(reference) {
            counts[p as usize][r as usize] += 1;
        }
        Ok(Self { counts })
    }

    pub fn counts(&self) -> [[u64; 2]; 2] {
        self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Fraction of agreeing predictions, `trace / total`.
    pub fn accuracy(&self) -> f64 {
        let correct = self.counts[0][0] + self.counts[1][1];
        correct as f64 / self.total() as f64
    }

    pub fn csv_header() -> String {
        "predicted,reference,count".into()
    }

    pub fn csv_rows(&self) -> Vec<String> {
        let mut rows = Vec::with_capacity(4);
        for p in 0..2 {
            for r in 0..2 {
                rows.push(format!("{p},{r},{}", self.counts[p][r]));
            }
        }
        rows
    }
}

/// Anything that maps a raw-scale design to success probabilities.
pub trait Predictor {
    fn predict_proba(&self, d: &Design) -> Result<Vec<f64>>;
}

impl Predictor for LogitFit {
    fn predict_proba(&self, d: &Design) -> Result<Vec<f64>> {
        LogitFit::predict_proba(self, d)
    }
}

impl Predictor for EnetFit {
    fn predict_proba(&self, d: &Design) -> Result<Vec<f64>> {
        EnetFit::predict_proba(self, d)
    }
}

/// Classify a test design at the probability `threshold` (class 1 iff
/// `p ≥ threshold`) and score against its response.
pub fn classify_and_score<P: Predictor>(
    fit: &P,
    d_test: &Design,
    threshold: f64,
) -> Result<(ConfusionMatrix, f64)> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(RegressError::InvalidParam(format!(
            "threshold must lie in (0, 1), got {threshold}"
        )));
    }
    let probs = fit.predict_proba(d_test)?;
    let predicted: Vec<u8> = probs.iter().map(|&p| u8::from(p >= threshold)).collect();
    let cm = ConfusionMatrix::from_labels(&predicted, d_test.response())?;
    let acc = cm.accuracy();
    Ok((cm, acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logit::fit_logit;

    #[test]
    fn documented_accuracy_values_are_exact() {
        let cm = ConfusionMatrix::new([[16, 2], [1, 6]]);
        assert_eq!(cm.total(), 25);
        assert_eq!(cm.accuracy(), 0.88);
        let cm = ConfusionMatrix::new([[8, 0], [9, 8]]);
        assert_eq!(cm.total(), 25);
        assert_eq!(cm.accuracy(), 0.64);
    }

    #[test]
    fn perfect_agreement_scores_one() {
        let labels = [0u8, 1, 1, 0, 1];
        let cm = ConfusionMatrix::from_labels(&labels, &labels).unwrap();
        assert_eq!(cm.accuracy(), 1.0);
        assert_eq!(cm.counts()[0][1] + cm.counts()[1][0], 0);
    }

    #[test]
    fn label_counting_matches_hand_tallies() {
        let predicted = [1u8, 1, 0, 0, 1];
        let reference = [1u8, 0, 0, 1, 1];
        let cm = ConfusionMatrix::from_labels(&predicted, &reference).unwrap();
        assert_eq!(cm.counts(), [[1, 1], [1, 2]]);
        assert_eq!(cm.accuracy(), 3.0 / 5.0);
        assert!(ConfusionMatrix::from_labels(&[0], &[0, 1]).is_err());
        assert!(ConfusionMatrix::from_labels(&[2], &[0]).is_err());
    }

    #[test]
    fn end_to_end_scoring_uses_the_threshold() {
        let rows: Vec<Vec<f64>> =
            (0..30).map(|i| vec![(i as f64 - 14.5) / 5.0 + ((i * 13) % 7) as f64 / 3.0]).collect();
        let y: Vec<u8> = (0..30).map(|i| u8::from((i + (i * 11) % 5) >= 15)).collect();
        let d = Design::new(&["x"], rows, y).unwrap();
        let fit = fit_logit(&d).unwrap();
        let (cm, acc) = classify_and_score(&fit, &d, 0.5).unwrap();
        assert_eq!(cm.total(), 30);
        assert!((0.0..=1.0).contains(&acc));
        assert!(classify_and_score(&fit, &d, 0.0).is_err());
        assert!(classify_and_score(&fit, &d, 1.0).is_err());
    }

    #[test]
    fn csv_projection_lists_all_four_cells() {
        let cm = ConfusionMatrix::new([[3, 1], [0, 2]]);
        let rows = cm.csv_rows();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0], "0,0,3");
        assert_eq!(rows[3], "1,1,2");
    }
}
