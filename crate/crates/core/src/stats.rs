use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::month::Month;
use crate::series::Dataset;

/// Arithmetic mean. Panics on empty input.
pub fn mean(v: &[f64]) -> f64 {
    assert!(!v.is_empty(), "mean of empty slice");
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample variance with denominator `n - 1`. Panics on length < 2.
pub fn sample_variance(v: &[f64]) -> f64 {
    assert!(v.len() >= 2, "variance needs >= 2 observations");
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64
}

/// Sample standard deviation (denominator `n - 1`).
pub fn sample_sd(v: &[f64]) -> f64 {
    sample_variance(v).sqrt()
}

/// Linear-interpolation quantile on the order statistics (the common
/// spreadsheet/R-default convention), `p` in [0, 1].
pub fn quantile(v: &[f64], p: f64) -> f64 {
    assert!(!v.is_empty(), "quantile of empty slice");
    assert!((0.0..=1.0).contains(&p), "quantile level outside [0, 1]");
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    quantile_sorted(&sorted, p)
}

/// `quantile` on pre-sorted data, avoiding the sort.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = p * (n - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

/// Pearson correlation of two equal-length slices.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, CoreError> {
    if x.len() != y.len() {
        return Err(CoreError::Misaligned(format!(
            "correlation inputs of lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(CoreError::Empty("correlation needs >= 2 observations".into()));
    }
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(CoreError::ZeroVariance("constant input to correlation".into()));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Pearson correlation matrix of every dataset column.
///
/// Symmetric with a unit diagonal; errors on any constant column.
pub fn correlation_matrix(d: &Dataset) -> Result<DMatrix<f64>, CoreError> {
    let k = d.n_columns();
    let mut m = DMatrix::zeros(k, k);
    for i in 0..k {
        m[(i, i)] = 1.0;
        for j in (i + 1)..k {
            let r = pearson(d.columns()[i].values(), d.columns()[j].values())?;
            m[(i, j)] = r;
            m[(j, i)] = r;
        }
    }
    Ok(m)
}

/// A partition of a month span into labeled contiguous phases.
///
/// `boundaries[i]` is the first month of segment `i + 1`; segment 0 runs from
/// the span start up to (excluding) the first boundary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseLabeling {
    boundaries: Vec<Month>,
    labels: Vec<String>,
}

impl PhaseLabeling {
    pub fn new(boundaries: Vec<Month>, labels: Vec<String>) -> Result<Self, CoreError> {
        if labels.len() != boundaries.len() + 1 {
            return Err(CoreError::InvalidLabeling(format!(
                "{} boundaries need {} labels, got {}",
                boundaries.len(),
                boundaries.len() + 1,
                labels.len()
            )));
        }
        if boundaries.windows(2).any(|w| w[1].diff(&w[0]) <= 0) {
            return Err(CoreError::InvalidLabeling(
                "boundaries must be strictly increasing".into(),
            ));
        }
        Ok(Self { boundaries, labels })
    }

    pub fn boundaries(&self) -> &[Month] {
        &self.boundaries
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn n_segments(&self) -> usize {
        self.labels.len()
    }

    /// Half-open month interval `[from, to_exclusive)` of segment `i` within
    /// `[span_start, span_end]`; the last segment closes at `span_end + 1`.
    fn segment_bounds(&self, i: usize, span_start: Month, span_end: Month) -> (Month, Month) {
        let from = if i == 0 { span_start } else { self.boundaries[i - 1] };
        let to = if i == self.n_segments() - 1 {
            span_end.plus(1)
        } else {
            self.boundaries[i]
        };
        (from, to)
    }

    /// Check the labeling sits strictly inside the dataset span.
    pub fn validate_span(&self, d: &Dataset) -> Result<(), CoreError> {
        for b in &self.boundaries {
            let inside = b.diff(&d.start()) > 0 && d.end().diff(b) > 0;
            if !inside {
                return Err(CoreError::InvalidLabeling(format!(
                    "boundary {b} not strictly inside span {}..{}",
                    d.start(),
                    d.end()
                )));
            }
        }
        Ok(())
    }
}

/// One row of a long-format density export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub variable: String,
    pub phase: String,
    pub x: f64,
    pub density: f64,
}

/// Silverman's rule-of-thumb bandwidth:
/// `0.9 * min(sd, IQR / 1.34) * n^(-1/5)`.
pub fn silverman_bandwidth(v: &[f64]) -> Result<f64, CoreError> {
    let sd = sample_sd(v);
    if sd <= 0.0 {
        return Err(CoreError::ZeroVariance(
            "kernel density of a constant segment".into(),
        ));
    }
    let iqr = quantile(v, 0.75) - quantile(v, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    Ok(0.9 * spread * (v.len() as f64).powf(-0.2))
}

/// Gaussian kernel density estimate of `v` evaluated on a uniform grid of
/// `grid_size` points spanning `[min - 3h, max + 3h]`.
pub fn gaussian_kde(v: &[f64], grid_size: usize) -> Result<Vec<(f64, f64)>, CoreError> {
    if v.len() < 2 {
        return Err(CoreError::Empty("kde needs >= 2 observations".into()));
    }
    if grid_size < 2 {
        return Err(CoreError::Empty("kde grid needs >= 2 points".into()));
    }
    let h = silverman_bandwidth(v)?;
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min) - 3.0 * h;
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 3.0 * h;
    let step = (hi - lo) / (grid_size - 1) as f64;
    let norm = 1.0 / (v.len() as f64 * h * (2.0 * std::f64::consts::PI).sqrt());
    let mut out = Vec::with_capacity(grid_size);
    for g in 0..grid_size {
        let x = lo + g as f64 * step;
        let dens: f64 = v
            .iter()
            .map(|xi| {
                let z = (x - xi) / h;
                (-0.5 * z * z).exp()
            })
            .sum::<f64>()
            * norm;
        out.push((x, dens));
    }
    Ok(out)
}

/// Per-variable, per-phase Gaussian KDE rows for plotting phase-conditional
/// distributions.
pub fn phase_density_export(
    d: &Dataset,
    labeling: &PhaseLabeling,
    grid_size: usize,
) -> Result<Vec<DensityRow>, CoreError> {
    labeling.validate_span(d)?;
    let mut rows = Vec::new();
    for col in d.columns() {
        for seg in 0..labeling.n_segments() {
            let (from, to_excl) = labeling.segment_bounds(seg, d.start(), d.end());
            let to = to_excl.plus(-1);
            let w = col.window(from, to)?;
            if w.len() < 2 {
                return Err(CoreError::SegmentTooShort {
                    label: labeling.labels()[seg].clone(),
                    len: w.len(),
                    min: 2,
                });
            }
            for (x, density) in gaussian_kde(w.values(), grid_size)? {
                rows.push(DensityRow {
                    variable: col.name().to_string(),
                    phase: labeling.labels()[seg].clone(),
                    x,
                    density,
                });
            }
        }
    }
    Ok(rows)
}

/// Trapezoid-rule integral of (x, y) pairs sorted by x.
pub fn trapezoid(points: &[(f64, f64)]) -> f64 {
    points
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
        .sum()
}
