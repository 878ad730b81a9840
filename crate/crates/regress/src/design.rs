use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{RegressError, Result};

/// Per-column location/scale record of a standardized design, kept so fitted
/// coefficients can be mapped back to the raw scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub mean: Vec<f64>,
    /// Sample standard deviation (denominator `n - 1`).
    pub sd: Vec<f64>,
}

/// A classification design: named feature columns and a binary response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Design {
    names: Vec<String>,
    /// Row-major feature matrix, `n x p`.
    rows: Vec<Vec<f64>>,
    /// Binary response, one label per row.
    y: Vec<u8>,
    /// Present when the columns were standardized by [`Design::standardize`].
    scaler: Option<Scaler>,
}

impl Design {
    /// Build a design from named columns of equal length and a 0/1 response.
    pub fn new(names: &[&str], rows: Vec<Vec<f64>>, y: Vec<u8>) -> Result<Self> {
        let p = names.len();
        if rows.len() != y.len() {
            return Err(RegressError::InvalidDesign(format!(
                "{} rows vs {} responses",
                rows.len(),
                y.len()
            )));
        }
        if rows.is_empty() {
            return Err(RegressError::InvalidDesign("empty design".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for n in names {
            if !seen.insert(*n) {
                return Err(RegressError::InvalidDesign(format!("duplicate feature name {n}")));
            }
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != p {
                return Err(RegressError::InvalidDesign(format!(
                    "row {i} has {} entries, expected {p}",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(RegressError::InvalidDesign(format!("row {i} has a non-finite entry")));
            }
        }
        if y.iter().any(|&v| v > 1) {
            return Err(RegressError::InvalidDesign("response labels must be 0 or 1".into()));
        }
        Ok(Self {
            names: names.iter().map(|s| s.to_string()).collect(),
            rows,
            y,
            scaler: None,
        })
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn p(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn response(&self) -> &[u8] {
        &self.y
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn scaler(&self) -> Option<&Scaler> {
        self.scaler.as_ref()
    }

    /// Fraction of ones in the response.
    pub fn class_rate(&self) -> f64 {
        self.y.iter().map(|&v| f64::from(v)).sum::<f64>() / self.n() as f64
    }

    /// Both classes present?
    pub fn has_both_classes(&self) -> bool {
        self.y.iter().any(|&v| v == 1) && self.y.iter().any(|&v| v == 0)
    }

    /// Column means and sample standard deviations.
    pub fn column_moments(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.n() as f64;
        let p = self.p();
        let mut mean = vec![0.0; p];
        for row in &self.rows {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut sd = vec![0.0; p];
        for row in &self.rows {
            for j in 0..p {
                sd[j] += (row[j] - mean[j]).powi(2);
            }
        }
        for s in &mut sd {
            *s = (*s / (n - 1.0)).sqrt();
        }
        (mean, sd)
    }

    /// Standardize every column to mean 0, sample variance 1, recording the
    /// scaler for back-transformation. Errors on a constant column.
    pub fn standardize(&self) -> Result<Self> {
        if self.n() < 2 {
            return Err(RegressError::InvalidDesign("need at least 2 rows to standardize".into()));
        }
        let (mean, sd) = self.column_moments();
        if let Some(j) = sd.iter().position(|&s| s <= 0.0 || !s.is_finite()) {
            return Err(RegressError::InvalidDesign(format!(
                "constant feature {} cannot be standardized",
                self.names[j]
            )));
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(j, v)| (v - mean[j]) / sd[j])
                    .collect()
            })
            .collect();
        Ok(Self {
            names: self.names.clone(),
            rows,
            y: self.y.clone(),
            scaler: Some(Scaler { mean, sd }),
        })
    }

    /// Apply another design's scaler to these columns (used to carry a
    /// training-window standardization onto a held-out block).
    pub fn standardize_with(&self, scaler: &Scaler) -> Result<Self> {
        if scaler.mean.len() != self.p() || scaler.sd.len() != self.p() {
            return Err(RegressError::InvalidDesign(format!(
                "scaler covers {} columns, design has {}",
                scaler.mean.len(),
                self.p()
            )));
        }
        if scaler.sd.iter().any(|&s| s <= 0.0 || !s.is_finite()) {
            return Err(RegressError::InvalidDesign("scaler has a nonpositive scale".into()));
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(j, v)| (v - scaler.mean[j]) / scaler.sd[j])
                    .collect()
            })
            .collect();
        Ok(Self {
            names: self.names.clone(),
            rows,
            y: self.y.clone(),
            scaler: Some(scaler.clone()),
        })
    }

    /// Row range `[start, end)` as a new design (keeps names, drops scaler).
    pub fn slice(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.n() {
            return Err(RegressError::InvalidDesign(format!(
                "slice [{start}, {end}) outside 0..{}",
                self.n()
            )));
        }
        Ok(Self {
            names: self.names.clone(),
            rows: self.rows[start..end].to_vec(),
            y: self.y[start..end].to_vec(),
            scaler: None,
        })
    }

    /// Subset of columns, by index, in the given order (drops scaler).
    pub fn select(&self, cols: &[usize]) -> Result<Self> {
        for &j in cols {
            if j >= self.p() {
                return Err(RegressError::InvalidDesign(format!("column {j} out of range")));
            }
        }
        Ok(Self {
            names: cols.iter().map(|&j| self.names[j].clone()).collect(),
            rows: self
                .rows
                .iter()
                .map(|row| cols.iter().map(|&j| row[j]).collect())
                .collect(),
            y: self.y.clone(),
            scaler: None,
        })
    }

    /// Design matrix with a leading intercept column, `n x (p + 1)`.
    pub(crate) fn with_intercept(&self) -> DMatrix<f64> {
        let n = self.n();
        let p = self.p();
        DMatrix::from_fn(n, p + 1, |i, j| if j == 0 { 1.0 } else { self.rows[i][j - 1] })
    }
}
