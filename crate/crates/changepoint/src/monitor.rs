use boombust_core::stats;
use boombust_core::{Month, PhaseLabeling, TimeSeries};
use serde::{Deserialize, Serialize};

use crate::config::{CpmConfig, ThresholdTable};
use crate::kernel::{d_max, KernelScratch};
use crate::CpmError;

/// A detected distribution change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangePoint {
    /// 0-based index of the last observation of the old regime; the new
    /// regime starts at `tau + 1`.
    pub tau: usize,
    /// 0-based index of the observation at which the alarm was raised.
    pub detection: usize,
    /// `detection - tau`.
    pub delay: usize,
}

/// Summary of one detected segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentSummary {
    /// 0-based first observation index.
    pub start: usize,
    /// 0-based last observation index (inclusive).
    pub end: usize,
    pub len: usize,
    pub mean: f64,
    /// Sample standard deviation; `None` for single-observation segments.
    pub sd: Option<f64>,
}

/// Ordered change points with per-segment summaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segmentation {
    pub change_points: Vec<ChangePoint>,
    pub segments: Vec<SegmentSummary>,
}

impl Segmentation {
    /// CSV rows `tau_month,detection_month,delay` for a sequence whose first
    /// observation falls in `start`.
    pub fn csv_rows(&self, start: Month) -> Vec<String> {
        self.change_points
            .iter()
            .map(|cp| {
                format!(
                    "{},{},{}",
                    start.plus(cp.tau as i64),
                    start.plus(cp.detection as i64),
                    cp.delay
                )
            })
            .collect()
    }
}

/// Sequential KS change-point monitor.
///
/// Feed observations one at a time with [`Monitor::feed`]; detections are
/// appended to [`Monitor::change_points`]. After an alarm at time `t` with
/// split estimate `tau`, monitoring restarts from `tau + 1`: the withheld
/// observations `tau + 1 ..= t` are replayed through a fresh segment (their
/// recorded detection index stays `t`, the moment the change was actually
/// found), so later change points inside the replayed stretch are still
/// recoverable.
///
/// A monitor is a strictly sequential state machine; drive one instance from
/// one thread only.
pub struct Monitor {
    config: CpmConfig,
    table: ThresholdTable,
    /// Index of the next global observation.
    global_t: usize,
    /// Global index of the first observation of the current segment.
    seg_offset: usize,
    /// Current segment in arrival order.
    buf: Vec<f64>,
    /// Current segment sorted by value, with parallel arrival times (1-based).
    sorted: Vec<f64>,
    arrivals: Vec<u32>,
    scratch: KernelScratch,
    groups: Vec<u32>,
    change_points: Vec<ChangePoint>,
    /// Per-global-observation statistic (0.0 while the segment is shorter
    /// than 3 observations).
    stat_trace: Vec<f64>,
    /// Per-global-observation threshold (`None` inside a startup window).
    threshold_trace: Vec<Option<f64>>,
}

impl Monitor {
    pub fn new(config: CpmConfig, table: &ThresholdTable) -> Result<Self, CpmError> {
        if table.arl0 != config.arl0 || table.burn_in != config.burn_in {
            return Err(CpmError::TableMismatch {
                table_arl0: table.arl0,
                table_burn: table.burn_in,
                cfg_arl0: config.arl0,
                cfg_burn: config.burn_in,
            });
        }
        table.validate()?;
        Ok(Self {
            config,
            table: table.clone(),
            global_t: 0,
            seg_offset: 0,
            buf: Vec::new(),
            sorted: Vec::new(),
            arrivals: Vec::new(),
            scratch: KernelScratch::default(),
            groups: Vec::new(),
            change_points: Vec::new(),
            stat_trace: Vec::new(),
            threshold_trace: Vec::new(),
        })
    }

    pub fn config(&self) -> &CpmConfig {
        &self.config
    }

    pub fn change_points(&self) -> &[ChangePoint] {
        &self.change_points
    }

    /// Statistic `D_t` recorded at each observation fed so far.
    pub fn stat_trace(&self) -> &[f64] {
        &self.stat_trace
    }

    /// Threshold in force at each observation fed so far.
    pub fn threshold_trace(&self) -> &[Option<f64>] {
        &self.threshold_trace
    }

    fn reset_segment(&mut self, new_offset: usize) {
        self.seg_offset = new_offset;
        self.buf.clear();
        self.sorted.clear();
        self.arrivals.clear();
    }

    fn push_obs(&mut self, x: f64) {
        self.buf.push(x);
        let t = self.buf.len() as u32;
        let pos = self.sorted.partition_point(|v| *v <= x);
        self.sorted.insert(pos, x);
        self.arrivals.insert(pos, t);
    }

    fn current_stat(&mut self) -> (f64, usize) {
        let t = self.buf.len();
        self.groups.clear();
        for j in 0..t {
            let last_of_group = j + 1 == t || self.sorted[j + 1] != self.sorted[j];
            if last_of_group {
                self.groups.push((j + 1) as u32);
            }
        }
        d_max(&self.arrivals, &self.groups, &mut self.scratch)
    }

    /// Process one observation; returns the number of change points raised.
    pub fn feed(&mut self, x: f64) -> Result<usize, CpmError> {
        if !x.is_finite() {
            return Err(CpmError::Core(boombust_core::CoreError::InvalidSeries {
                name: "monitor input".into(),
                reason: "non-finite observation".into(),
            }));
        }
        let gi = self.global_t;
        self.global_t += 1;
        let found_before = self.change_points.len();

        let mut pending: std::collections::VecDeque<f64> = std::collections::VecDeque::new();
        pending.push_back(x);
        let mut is_replay = false;
        while let Some(v) = pending.pop_front() {
            self.push_obs(v);
            let t = self.buf.len();
            let (d, khat) = if t >= 3 {
                self.current_stat()
            } else {
                (0.0, 0)
            };
            let h = self.table.threshold(t)?;
            if !is_replay {
                self.stat_trace.push(d);
                self.threshold_trace.push(h);
            }
            if let Some(h) = h {
                if d > h {
                    let tau = self.seg_offset + khat - 1;
                    self.change_points.push(ChangePoint {
                        tau,
                        detection: gi,
                        delay: gi - tau,
                    });
                    let carried: Vec<f64> = self.buf[khat..].to_vec();
                    self.reset_segment(tau + 1);
                    // Replay the withheld observations ahead of anything left.
                    for (offset, c) in carried.into_iter().enumerate() {
                        pending.insert(offset, c);
                    }
                    is_replay = true;
                }
            }
            if pending.is_empty() {
                is_replay = false;
            }
        }
        Ok(self.change_points.len() - found_before)
    }

    /// Final segmentation over everything fed so far.
    pub fn finish(&self) -> Segmentation {
        Segmentation {
            change_points: self.change_points.clone(),
            segments: Vec::new(),
        }
    }
}

fn summarize(x: &[f64], change_points: &[ChangePoint]) -> Vec<SegmentSummary> {
    let mut bounds = vec![0usize];
    for cp in change_points {
        bounds.push(cp.tau + 1);
    }
    bounds.push(x.len());
    bounds
        .windows(2)
        .map(|w| {
            let seg = &x[w[0]..w[1]];
            SegmentSummary {
                start: w[0],
                end: w[1] - 1,
                len: seg.len(),
                mean: stats::mean(seg),
                sd: if seg.len() >= 2 {
                    Some(stats::sample_sd(seg))
                } else {
                    None
                },
            }
        })
        .collect()
}

/// Run the sequential monitor over a full sequence.
pub fn monitor(
    x: &[f64],
    config: &CpmConfig,
    table: &ThresholdTable,
) -> Result<Segmentation, CpmError> {
    let mut m = Monitor::new(*config, table)?;
    for &v in x {
        m.feed(v)?;
    }
    Ok(Segmentation {
        change_points: m.change_points.clone(),
        segments: summarize(x, &m.change_points),
    })
}

/// Monitor the log-returns of a strictly positive price series and map the
/// detected change points back to calendar months.
///
/// Returns the return-space segmentation together with a [`PhaseLabeling`]
/// whose boundaries are the first months of each new regime (a return is
/// stamped with the month it ends in, so a change after return index `tau`
/// makes the boundary the month of return `tau + 1`).
pub fn segment_returns(
    prices: &TimeSeries,
    config: &CpmConfig,
    table: &ThresholdTable,
) -> Result<(Segmentation, PhaseLabeling), CpmError> {
    let min_len = config.burn_in as usize + 2;
    if prices.len() < min_len {
        return Err(CpmError::TooShort(prices.len(), min_len));
    }
    if let Some(i) = prices.values().iter().position(|v| *v <= 0.0) {
        return Err(CpmError::Core(boombust_core::CoreError::Transform(format!(
            "nonpositive price {} at {}",
            prices.values()[i],
            prices.month_at(i)
        ))));
    }
    let returns: Vec<f64> = prices
        .values()
        .windows(2)
        .map(|w| (w[1] / w[0]).ln())
        .collect();
    let seg = monitor(&returns, config, table)?;
    let returns_start = prices.start().plus(1);
    let boundaries: Vec<Month> = seg
        .change_points
        .iter()
        .map(|cp| returns_start.plus(cp.tau as i64 + 1))
        .collect();
    let labels: Vec<String> = (1..=boundaries.len() + 1)
        .map(|i| format!("phase_{i}"))
        .collect();
    let labeling = PhaseLabeling::new(boundaries, labels)?;
    Ok((seg, labeling))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::TailInfo;

    fn flat_table(arl0: u32, burn_in: u32, h: f64) -> ThresholdTable {
        ThresholdTable::from_parts(
            arl0,
            burn_in,
            10_000,
            vec![h; 10_000 - burn_in as usize],
            1000,
            0,
            500,
            TailInfo {
                a: h,
                b: 0.0,
                fit_from: 100,
                shift: 0.0,
            },
            None,
            "test".into(),
        )
        .unwrap()
    }

    #[test]
    fn monitor_rejects_mismatched_table() {
        let cfg = CpmConfig::new(100, 10).unwrap();
        let table = flat_table(100, 20, 2.0);
        assert!(matches!(
            Monitor::new(cfg, &table),
            Err(CpmError::TableMismatch { .. })
        ));
    }

    #[test]
    fn no_detection_inside_startup_window() {
        // A gigantic level shift right away, but thresholds only apply
        // after burn_in = 20: the alarm cannot fire before observation 21.
        let cfg = CpmConfig::new(100, 20).unwrap();
        let table = flat_table(100, 20, 0.5);
        let mut x = vec![0.0; 5];
        x.extend(vec![50.0; 30]);
        let seg = monitor(&x, &cfg, &table).unwrap();
        assert!(!seg.change_points.is_empty());
        let first = &seg.change_points[0];
        assert!(first.detection + 1 > 20, "alarm at t = {}", first.detection + 1);
        assert!(first.tau < first.detection);
        // tau estimates the split at index 4 (last observation of the old regime).
        assert_eq!(first.tau, 4);
    }

    #[test]
    fn obvious_shift_is_found_and_segments_summarized() {
        let cfg = CpmConfig::new(100, 4).unwrap();
        let table = flat_table(100, 4, 1.2);
        let mut x: Vec<f64> = (0..30).map(|i| (i % 5) as f64 * 0.1).collect();
        x.extend((0..30).map(|i| 10.0 + (i % 5) as f64 * 0.1));
        let seg = monitor(&x, &cfg, &table).unwrap();
        assert_eq!(seg.change_points.len(), 1);
        let cp = &seg.change_points[0];
        assert_eq!(cp.tau, 29);
        assert_eq!(seg.segments.len(), 2);
        assert_eq!(seg.segments[0].start, 0);
        assert_eq!(seg.segments[0].end, 29);
        assert_eq!(seg.segments[1].start, 30);
        assert!(seg.segments[1].mean > 9.0);
        assert_eq!(cp.delay, cp.detection - cp.tau);
    }

    #[test]
    fn feeding_one_by_one_matches_batch_run() {
        let cfg = CpmConfig::new(100, 4).unwrap();
        let table = flat_table(100, 4, 1.1);
        let x: Vec<f64> = (0..80)
            .map(|i| if i >= 40 { 5.0 } else { 0.0 } + ((i * 17) % 7) as f64 * 0.3)
            .collect();
        let batch = monitor(&x, &cfg, &table).unwrap();
        let mut m = Monitor::new(cfg, &table).unwrap();
        for &v in &x {
            m.feed(v).unwrap();
        }
        assert_eq!(batch.change_points, m.change_points().to_vec());
        assert_eq!(m.stat_trace().len(), x.len());
        assert_eq!(m.threshold_trace().len(), x.len());
    }

    #[test]
    fn horizon_exhaustion_is_reported() {
        let cfg = CpmConfig::new(100, 4).unwrap();
        // A deliberately short unvalidated table: horizon 30, no alarms.
        let table = ThresholdTable::for_tests(100, 4, 30, vec![f64::MAX; 26]);
        let mut m = Monitor {
            config: cfg,
            table,
            global_t: 0,
            seg_offset: 0,
            buf: Vec::new(),
            sorted: Vec::new(),
            arrivals: Vec::new(),
            scratch: KernelScratch::default(),
            groups: Vec::new(),
            change_points: Vec::new(),
            stat_trace: Vec::new(),
            threshold_trace: Vec::new(),
        };
        for i in 0..30 {
            m.feed((i % 13) as f64).unwrap();
        }
        assert!(matches!(
            m.feed(1.0),
            Err(CpmError::HorizonExhausted { .. })
        ));
    }

    #[test]
    fn segment_returns_maps_to_months() {
        let cfg = CpmConfig::new(100, 4).unwrap();
        let table = flat_table(100, 4, 1.2);
        // 40 flat months then 40 strongly trending months.
        let mut prices = vec![100.0];
        for i in 1..80 {
            let growth = if i >= 40 { 1.25 } else { 1.0 };
            let wiggle = 1.0 + 0.001 * ((i * 7) % 5) as f64;
            prices.push(prices[i - 1] * growth * wiggle);
        }
        let series = TimeSeries::new("px", "2005-01".parse().unwrap(), prices).unwrap();
        let (seg, labeling) = segment_returns(&series, &cfg, &table).unwrap();
        assert_eq!(seg.change_points.len(), 1);
        let cp = &seg.change_points[0];
        // Return index 39 is the first changed return (price 39 -> 40), so the
        // old regime's last return index is 38 and the boundary month is that
        // of return 39: 2005-02 + 39 months.
        assert_eq!(cp.tau, 38);
        assert_eq!(labeling.boundaries().len(), 1);
        let expected: Month = "2005-02".parse::<Month>().unwrap().plus(39);
        assert_eq!(labeling.boundaries()[0], expected);
        assert_eq!(labeling.labels(), &["phase_1".to_string(), "phase_2".to_string()]);
    }

    #[test]
    fn segment_returns_rejects_nonpositive_prices() {
        let cfg = CpmConfig::new(100, 4).unwrap();
        let table = flat_table(100, 4, 1.2);
        let series = TimeSeries::new(
            "px",
            "2005-01".parse().unwrap(),
            vec![1.0, 2.0, -1.0, 2.0, 1.0, 1.0, 1.0],
        )
        .unwrap();
        assert!(segment_returns(&series, &cfg, &table).is_err());
    }
}
