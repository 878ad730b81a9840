use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::month::Month;

/// A monthly time series with no internal gaps.
///
/// The timestamp of `values[i]` is `start + i` months. Values must be finite;
/// a missing or non-finite observation is a construction error, never an
/// imputed value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    name: String,
    start: Month,
    values: Vec<f64>,
    /// Human-readable record of the transform pipeline applied so far.
    #[serde(default)]
    pipeline: Vec<String>,
}

impl TimeSeries {
    pub fn new(
        name: impl Into<String>,
        start: Month,
        values: Vec<f64>,
    ) -> Result<Self, CoreError> {
        let name = name.into();
        if values.is_empty() {
            return Err(CoreError::InvalidSeries {
                name,
                reason: "length must be >= 1".into(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(CoreError::InvalidSeries {
                name,
                reason: format!("non-finite value at index {i}"),
            });
        }
        Ok(Self {
            name,
            start,
            values,
            pipeline: Vec::new(),
        })
    }

    pub(crate) fn with_pipeline(
        name: String,
        start: Month,
        values: Vec<f64>,
        pipeline: Vec<String>,
    ) -> Result<Self, CoreError> {
        let mut s = Self::new(name, start, values)?;
        s.pipeline = pipeline;
        Ok(s)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn start(&self) -> Month {
        self.start
    }

    pub fn end(&self) -> Month {
        self.start.plus(self.len() as i64 - 1)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn pipeline(&self) -> &[String] {
        &self.pipeline
    }

    /// Month of observation `i`.
    pub fn month_at(&self, i: usize) -> Month {
        self.start.plus(i as i64)
    }

    /// Index of `m` within the span, if covered.
    pub fn index_of(&self, m: Month) -> Option<usize> {
        let d = m.diff(&self.start);
        if d >= 0 && (d as usize) < self.len() {
            Some(d as usize)
        } else {
            None
        }
    }

    /// Restrict to the closed month interval `[from, to]`.
    pub fn window(&self, from: Month, to: Month) -> Result<Self, CoreError> {
        let i = self.index_of(from).ok_or_else(|| CoreError::Misaligned(
            format!("window start {from} outside span of `{}`", self.name),
        ))?;
        let j = self.index_of(to).ok_or_else(|| CoreError::Misaligned(
            format!("window end {to} outside span of `{}`", self.name),
        ))?;
        if j < i {
            return Err(CoreError::Misaligned(format!(
                "window end {to} precedes start {from}"
            )));
        }
        Self::with_pipeline(
            self.name.clone(),
            from,
            self.values[i..=j].to_vec(),
            self.pipeline.clone(),
        )
    }

    pub fn rename(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

/// A collection of equal-span monthly series sharing one calendar index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    columns: Vec<TimeSeries>,
}

impl Dataset {
    /// Build from pre-aligned columns: identical start and length, unique names.
    pub fn new(columns: Vec<TimeSeries>) -> Result<Self, CoreError> {
        if columns.is_empty() {
            return Err(CoreError::Empty("dataset needs at least one column".into()));
        }
        let start = columns[0].start();
        let len = columns[0].len();
        for c in &columns {
            if c.start() != start || c.len() != len {
                return Err(CoreError::Misaligned(format!(
                    "column `{}` spans {}..{} but `{}` spans {}..{}",
                    c.name(),
                    c.start(),
                    c.end(),
                    columns[0].name(),
                    start,
                    columns[0].end()
                )));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for c in &columns {
            if !seen.insert(c.name().to_string()) {
                return Err(CoreError::DuplicateColumn(c.name().to_string()));
            }
        }
        Ok(Self { columns })
    }

    /// Align arbitrary-span series on their common month interval.
    pub fn align(series: Vec<TimeSeries>) -> Result<Self, CoreError> {
        if series.is_empty() {
            return Err(CoreError::Empty("nothing to align".into()));
        }
        let start = series.iter().map(|s| s.start()).max().unwrap();
        let end = series.iter().map(|s| s.end()).min().unwrap();
        if end.diff(&start) < 0 {
            return Err(CoreError::EmptyIntersection);
        }
        let windowed = series
            .into_iter()
            .map(|s| s.window(start, end))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(windowed)
    }

    /// Merge several datasets on their common month interval, keeping column order.
    pub fn merge(parts: &[Dataset]) -> Result<Self, CoreError> {
        let all: Vec<TimeSeries> = parts
            .iter()
            .flat_map(|d| d.columns.iter().cloned())
            .collect();
        Self::align(all)
    }

    pub fn start(&self) -> Month {
        self.columns[0].start()
    }

    pub fn end(&self) -> Month {
        self.columns[0].end()
    }

    pub fn len(&self) -> usize {
        self.columns[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[TimeSeries] {
        &self.columns
    }

    pub fn names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name()).collect()
    }

    pub fn column(&self, name: &str) -> Option<&TimeSeries> {
        self.columns.iter().find(|c| c.name() == name)
    }

    /// Columns in the given order; errors on any missing name.
    pub fn select(&self, names: &[&str]) -> Result<Self, CoreError> {
        let cols = names
            .iter()
            .map(|n| {
                self.column(n)
                    .cloned()
                    .ok_or_else(|| CoreError::MissingColumn((*n).to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(cols)
    }

    /// Month of row `i`.
    pub fn month_at(&self, i: usize) -> Month {
        self.columns[0].month_at(i)
    }

    pub fn index_of(&self, m: Month) -> Option<usize> {
        self.columns[0].index_of(m)
    }

    /// Restrict every column to `[from, to]`.
    pub fn window(&self, from: Month, to: Month) -> Result<Self, CoreError> {
        let cols = self
            .columns
            .iter()
            .map(|c| c.window(from, to))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(cols)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn month(s: &str) -> Month {
        s.parse().unwrap()
    }

    #[test]
    fn series_rejects_empty_and_non_finite() {
        assert!(TimeSeries::new("x", month("2005-01"), vec![]).is_err());
        assert!(TimeSeries::new("x", month("2005-01"), vec![1.0, f64::NAN]).is_err());
        assert!(TimeSeries::new("x", month("2005-01"), vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn align_takes_interval_intersection() {
        // Spans 2005-01..2005-12 and 2005-06..2006-06 intersect on 7 months.
        let a = TimeSeries::new("a", month("2005-01"), (0..12).map(f64::from).collect()).unwrap();
        let b = TimeSeries::new("b", month("2005-06"), (0..13).map(f64::from).collect()).unwrap();
        let d = Dataset::align(vec![a, b]).unwrap();
        assert_eq!(d.len(), 7);
        assert_eq!(d.start(), month("2005-06"));
        assert_eq!(d.end(), month("2005-12"));
        assert_eq!(d.column("a").unwrap().values()[0], 5.0);
        assert_eq!(d.column("b").unwrap().values()[0], 0.0);
    }

    #[test]
    fn align_rejects_disjoint_spans() {
        let a = TimeSeries::new("a", month("2005-01"), vec![1.0, 2.0]).unwrap();
        let b = TimeSeries::new("b", month("2006-01"), vec![1.0, 2.0]).unwrap();
        assert!(matches!(
            Dataset::align(vec![a, b]),
            Err(CoreError::EmptyIntersection)
        ));
    }

    #[test]
    fn duplicate_names_rejected() {
        let a = TimeSeries::new("a", month("2005-01"), vec![1.0, 2.0]).unwrap();
        let b = TimeSeries::new("a", month("2005-01"), vec![3.0, 4.0]).unwrap();
        assert!(matches!(
            Dataset::new(vec![a, b]),
            Err(CoreError::DuplicateColumn(_))
        ));
    }

    #[test]
    fn alignment_is_associative() {
        let a = TimeSeries::new("a", month("2005-01"), (0..24).map(f64::from).collect()).unwrap();
        let b = TimeSeries::new("b", month("2005-07"), (0..24).map(f64::from).collect()).unwrap();
        let c = TimeSeries::new("c", month("2006-01"), (0..24).map(f64::from).collect()).unwrap();

        let ab = Dataset::align(vec![a.clone(), b.clone()]).unwrap();
        let ab_c = Dataset::merge(&[ab, Dataset::new(vec![c.clone()]).unwrap()]).unwrap();
        let abc = Dataset::align(vec![a, b, c]).unwrap();
        assert_eq!(ab_c, abc);
    }
}
