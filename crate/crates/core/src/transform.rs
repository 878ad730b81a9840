use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::series::TimeSeries;
use crate::stats;

/// One step of a transform pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "op", content = "k")]
pub enum TransformStep {
    /// Natural logarithm; requires strictly positive inputs.
    Log,
    /// Lag-k difference `y_t - y_{t-k}`; shrinks the series by `k`.
    Difference(usize),
    /// `log(y_t) - log(y_{t-1})`; shrinks the series by 1.
    LogReturn,
    /// Subtract the sample mean and divide by the sample standard deviation
    /// (denominator `n - 1`).
    Standardize,
    /// Shift values back by `k` months: the output at month `t` holds the
    /// input at `t - k`. Shrinks the series by `k`.
    Lag(usize),
}

impl TransformStep {
    fn describe(&self) -> String {
        match self {
            TransformStep::Log => "log".into(),
            TransformStep::Difference(k) => format!("difference({k})"),
            TransformStep::LogReturn => "log_return".into(),
            TransformStep::Standardize => "standardize".into(),
            TransformStep::Lag(k) => format!("lag({k})"),
        }
    }
}

/// An ordered transform pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct TransformSpec {
    pub steps: Vec<TransformStep>,
}

impl TransformSpec {
    pub fn new(steps: Vec<TransformStep>) -> Result<Self, CoreError> {
        for s in &steps {
            match s {
                TransformStep::Difference(k) | TransformStep::Lag(k) if *k < 1 => {
                    return Err(CoreError::Transform(format!(
                        "{} requires order >= 1",
                        s.describe()
                    )));
                }
                _ => {}
            }
        }
        Ok(Self { steps })
    }
}

/// Apply every step of `spec` to `s`, in order.
///
/// The result records the applied pipeline in its metadata. Differencing and
/// lagging shift the start month forward so timestamps stay truthful.
pub fn apply_transform(s: &TimeSeries, spec: &TransformSpec) -> Result<TimeSeries, CoreError> {
    let mut out = s.clone();
    for step in &spec.steps {
        out = apply_step(&out, step)?;
    }
    Ok(out)
}

fn apply_step(s: &TimeSeries, step: &TransformStep) -> Result<TimeSeries, CoreError> {
    let v = s.values();
    let n = v.len();
    let (values, shift): (Vec<f64>, usize) = match step {
        TransformStep::Log => {
            if let Some(i) = v.iter().position(|&x| x <= 0.0) {
                return Err(CoreError::Transform(format!(
                    "log of nonpositive value {} at {} in `{}`",
                    v[i],
                    s.month_at(i),
                    s.name()
                )));
            }
            (v.iter().map(|x| x.ln()).collect(), 0)
        }
        TransformStep::Difference(k) => {
            if *k >= n {
                return Err(CoreError::Transform(format!(
                    "difference({k}) on series of length {n}"
                )));
            }
            ((*k..n).map(|t| v[t] - v[t - k]).collect(), *k)
        }
        TransformStep::LogReturn => {
            if n < 2 {
                return Err(CoreError::Transform(
                    "log_return needs at least 2 observations".into(),
                ));
            }
            if let Some(i) = v.iter().position(|&x| x <= 0.0) {
                return Err(CoreError::Transform(format!(
                    "log_return of nonpositive value {} at {} in `{}`",
                    v[i],
                    s.month_at(i),
                    s.name()
                )));
            }
            ((1..n).map(|t| (v[t] / v[t - 1]).ln()).collect(), 1)
        }
        TransformStep::Standardize => (standardize_values(v, s.name())?, 0),
        TransformStep::Lag(k) => {
            if *k >= n {
                return Err(CoreError::Transform(format!(
                    "lag({k}) on series of length {n}"
                )));
            }
            (v[..n - k].to_vec(), *k)
        }
    };
    let mut pipeline = s.pipeline().to_vec();
    pipeline.push(step.describe());
    TimeSeries::with_pipeline(
        s.name().to_string(),
        s.start().plus(shift as i64),
        values,
        pipeline,
    )
}

fn standardize_values(v: &[f64], name: &str) -> Result<Vec<f64>, CoreError> {
    if v.len() < 2 {
        return Err(CoreError::Transform(
            "standardize needs at least 2 observations".into(),
        ));
    }
    let mean = stats::mean(v);
    let var = stats::sample_variance(v);
    if var <= 0.0 || !var.is_finite() {
        return Err(CoreError::ZeroVariance(format!(
            "cannot standardize constant series `{name}`"
        )));
    }
    let sd = var.sqrt();
    Ok(v.iter().map(|x| (x - mean) / sd).collect())
}

/// Standardize a series to sample mean 0 and sample variance 1.
pub fn standardize(s: &TimeSeries) -> Result<TimeSeries, CoreError> {
    apply_step(s, &TransformStep::Standardize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::month::Month;
    use crate::stats;

    fn series(values: Vec<f64>) -> TimeSeries {
        TimeSeries::new("x", "2005-01".parse::<Month>().unwrap(), values).unwrap()
    }

    #[test]
    fn log_of_ones_is_zeros() {
        let out = apply_transform(
            &series(vec![1.0, 1.0, 1.0]),
            &TransformSpec::new(vec![TransformStep::Log]).unwrap(),
        )
        .unwrap();
        assert_eq!(out.values(), &[0.0, 0.0, 0.0]);
        assert_eq!(out.pipeline(), &["log".to_string()]);
    }

    #[test]
    fn first_difference_example() {
        let out = apply_transform(
            &series(vec![1.0, 2.0, 4.0]),
            &TransformSpec::new(vec![TransformStep::Difference(1)]).unwrap(),
        )
        .unwrap();
        assert_eq!(out.values(), &[1.0, 2.0]);
        assert_eq!(out.start().to_string(), "2005-02");
    }

    #[test]
    fn log_then_double_difference_composes_analytically() {
        // log-levels 0, 1, 3, 6 -> diffs 1, 2, 3 -> diffs 1, 1.
        let e = std::f64::consts::E;
        let out = apply_transform(
            &series(vec![1.0, e, e.powi(3), e.powi(6)]),
            &TransformSpec::new(vec![
                TransformStep::Log,
                TransformStep::Difference(1),
                TransformStep::Difference(1),
            ])
            .unwrap(),
        )
        .unwrap();
        assert_eq!(out.len(), 2);
        for (got, want) in out.values().iter().zip([1.0, 1.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        assert_eq!(out.start().to_string(), "2005-03");
    }

    #[test]
    fn standardize_symmetric_triple() {
        let out = standardize(&series(vec![1.0, 2.0, 3.0])).unwrap();
        assert_eq!(out.values(), &[-1.0, 0.0, 1.0]);
    }

    #[test]
    fn standardize_hits_moment_targets() {
        let out = standardize(&series(vec![3.5, -1.0, 2.25, 9.0, 0.5, -4.0])).unwrap();
        assert!(stats::mean(out.values()).abs() < 1e-12);
        assert!((stats::sample_variance(out.values()) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn standardize_rejects_constant() {
        assert!(matches!(
            standardize(&series(vec![5.0, 5.0, 5.0])),
            Err(CoreError::ZeroVariance(_))
        ));
    }

    #[test]
    fn log_rejects_nonpositive() {
        assert!(apply_transform(
            &series(vec![1.0, 0.0]),
            &TransformSpec::new(vec![TransformStep::Log]).unwrap()
        )
        .is_err());
    }

    #[test]
    fn lag_shifts_calendar() {
        let out = apply_transform(
            &series(vec![10.0, 20.0, 30.0]),
            &TransformSpec::new(vec![TransformStep::Lag(1)]).unwrap(),
        )
        .unwrap();
        // At 2005-02 the lag-1 series holds the 2005-01 input.
        assert_eq!(out.start().to_string(), "2005-02");
        assert_eq!(out.values(), &[10.0, 20.0]);
    }

    #[test]
    fn log_return_matches_log_diff() {
        let s = series(vec![1.0, 2.0, 4.0, 2.0]);
        let a = apply_transform(
            &s,
            &TransformSpec::new(vec![TransformStep::LogReturn]).unwrap(),
        )
        .unwrap();
        let b = apply_transform(
            &s,
            &TransformSpec::new(vec![TransformStep::Log, TransformStep::Difference(1)]).unwrap(),
        )
        .unwrap();
        assert_eq!(a.values(), b.values());
        assert_eq!(a.start(), b.start());
    }

    #[test]
    fn order_ge_one_enforced() {
        assert!(TransformSpec::new(vec![TransformStep::Difference(0)]).is_err());
        assert!(TransformSpec::new(vec![TransformStep::Lag(0)]).is_err());
    }
}
