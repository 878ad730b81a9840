use boombust_core::rng::substream;
use boombust_core::{Month, TimeSeries};
use serde::{Deserialize, Serialize};

use crate::egarch::{egarch_draws, EgarchParams};
use crate::error::{Result, SimError};

/// Half-open index window `[start, end)` over 0-based observations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub start: usize,
    pub end: usize,
}

impl Window {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn empty() -> Self {
        Self { start: 0, end: 0 }
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn contains(&self, i: usize) -> bool {
        i >= self.start && i < self.end
    }
}

/// Shape of the post-peak collapse, controlling how abruptly the level
/// contracts once the explosive window ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CollapsePattern {
    /// Violent contraction over a handful of observations.
    Sudden,
    /// Intermediate contraction spread over several observations.
    Disturbing,
    /// Gentle contraction spread over many observations.
    Smooth,
}

impl CollapsePattern {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Sudden => "sudden",
            Self::Disturbing => "disturbing",
            Self::Smooth => "smooth",
        }
    }

    /// Default `(β_collapse, |C|)` pair. Window lengths trade off three
    /// constraints: a collapse shorter than about four observations is
    /// invisible to any two-sample split statistic (a tiny minority caps the
    /// statistic below every calibrated threshold), a longer window combined
    /// with a violent per-observation root would drive the level to zero
    /// and break log-returns, and the full contraction must still be large
    /// enough to end the explosive episode decisively.
    pub fn defaults(&self) -> (f64, usize) {
        match self {
            Self::Sudden => (0.25, 5),
            Self::Disturbing => (0.5, 6),
            Self::Smooth => (1.0, 12),
        }
    }
}

/// Ground-truth phase marks of a simulated bubble, all 0-based observation
/// indexes: the first explosive observation, the first collapse observation,
/// and the last collapse observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseTruth {
    pub formation_start: usize,
    pub burst: usize,
    pub decline_end: usize,
}

impl PhaseTruth {
    pub fn new(formation_start: usize, burst: usize, decline_end: usize) -> Result<Self> {
        if !(formation_start < burst && burst < decline_end) {
            return Err(SimError::InvalidPhases(format!(
                "need formation_start < burst < decline_end, got ({formation_start}, {burst}, {decline_end})"
            )));
        }
        Ok(Self {
            formation_start,
            burst,
            decline_end,
        })
    }

    pub fn as_array(&self) -> [usize; 3] {
        [self.formation_start, self.burst, self.decline_end]
    }
}

/// Piecewise random-walk / explosive / collapse data-generating process with
/// EGARCH(1,1) level innovations `ε_t`:
///
/// ```text
/// y_t = a·T^(−η) + y_{t−1} + ε_t   outside B and C
/// y_t = δ_T·y_{t−1} + ε_t          on B,  δ_T = 1 + c1·T^(−α)
/// y_t = γ_T·y_{t−1} + ε_t          on C,  γ_T = 1 − c2·T^(−β)
/// ```
///
/// `B` (explosion) and `C` (collapse) are disjoint windows with `C`
/// immediately following `B`; both may be empty, yielding a drifted random
/// walk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DgpConfig {
    /// Number of observations emitted.
    pub t: usize,
    /// Initial level `y_0`.
    pub y0: f64,
    /// Drift scale `a`.
    pub a: f64,
    /// Drift decay `η`.
    pub eta: f64,
    /// Explosion strength `c1`.
    pub c1: f64,
    /// Explosion decay `α` in `δ_T = 1 + c1·T^(−α)`.
    pub alpha_x: f64,
    /// Collapse strength `c2`.
    pub c2: f64,
    /// Collapse decay `β` in `γ_T = 1 − c2·T^(−β)`.
    pub beta_x: f64,
    /// Explosive window.
    pub b: Window,
    /// Collapse window.
    pub c: Window,
    /// Label echoed in study reports.
    pub pattern: CollapsePattern,
    pub egarch: EgarchParams,
    pub seed: u64,
}

impl DgpConfig {
    /// Canonical configuration for a pattern: `T = y_0 = 100`,
    /// `a = c1 = c2 = 1`, `η = 1`, `B = [0.4T, 0.6T)`, with the pattern's
    /// `(β, |C|)` pair and default EGARCH coefficients. The explosion decay
    /// `α = 0.95` gives a modest `δ_T ≈ 1.013` — strong enough that every
    /// detector finds the episode, weak enough that detection timing is
    /// genuinely random rather than a foregone conclusion.
    pub fn default_for(pattern: CollapsePattern, seed: u64) -> Self {
        let (beta_x, c_len) = pattern.defaults();
        Self {
            t: 100,
            y0: 100.0,
            a: 1.0,
            eta: 1.0,
            c1: 1.0,
            alpha_x: 0.95,
            c2: 1.0,
            beta_x,
            b: Window::new(40, 60),
            c: Window::new(60, 60 + c_len),
            pattern,
            egarch: EgarchParams::default(),
            seed,
        }
    }

    /// Explosive autoregressive root `δ_T = 1 + c1·T^(−α) > 1`.
    pub fn delta(&self) -> f64 {
        1.0 + self.c1 * (self.t as f64).powf(-self.alpha_x)
    }

    /// Collapsing autoregressive root `γ_T = 1 − c2·T^(−β) < 1`.
    pub fn gamma(&self) -> f64 {
        1.0 - self.c2 * (self.t as f64).powf(-self.beta_x)
    }

    pub fn validate(&self) -> Result<()> {
        if self.t < 40 {
            return Err(SimError::InvalidConfig(format!(
                "need T >= 40, got {}",
                self.t
            )));
        }
        for (name, v) in [
            ("y0", self.y0),
            ("a", self.a),
            ("eta", self.eta),
            ("c1", self.c1),
            ("alpha_x", self.alpha_x),
            ("c2", self.c2),
            ("beta_x", self.beta_x),
        ] {
            if !v.is_finite() {
                return Err(SimError::InvalidConfig(format!("{name} = {v}")));
            }
        }
        for (name, v) in [
            ("c1", self.c1),
            ("alpha_x", self.alpha_x),
            ("c2", self.c2),
            ("beta_x", self.beta_x),
        ] {
            if v <= 0.0 {
                return Err(SimError::InvalidConfig(format!(
                    "need {name} > 0, got {v}"
                )));
            }
        }
        debug_assert!(self.delta() > 1.0);
        debug_assert!(self.gamma() < 1.0);
        if self.b.is_empty() && self.c.is_empty() {
            return Ok(());
        }
        if self.b.is_empty() || self.c.is_empty() {
            return Err(SimError::InvalidConfig(
                "explosion and collapse windows must be both empty or both set".into(),
            ));
        }
        if !(self.b.start >= 1 && self.b.start < self.b.end) {
            return Err(SimError::InvalidConfig(format!(
                "explosive window [{}, {}) must start at 1 or later",
                self.b.start, self.b.end
            )));
        }
        if self.c.start != self.b.end {
            return Err(SimError::InvalidConfig(format!(
                "collapse window must start where the explosive window ends ({} != {})",
                self.c.start, self.b.end
            )));
        }
        if self.c.len() < 2 {
            return Err(SimError::InvalidConfig(
                "collapse window needs at least two observations".into(),
            ));
        }
        if self.c.end > self.t {
            return Err(SimError::InvalidConfig(format!(
                "collapse window ends at {} beyond T = {}",
                self.c.end, self.t
            )));
        }
        if self.gamma() <= 0.0 {
            return Err(SimError::InvalidConfig(format!(
                "collapse root gamma = {} must stay positive",
                self.gamma()
            )));
        }
        Ok(())
    }

    /// Ground-truth phase marks `(min B, min C, max C)`; `None` when the
    /// windows are empty.
    pub fn truth(&self) -> Option<PhaseTruth> {
        if self.b.is_empty() {
            None
        } else {
            Some(PhaseTruth {
                formation_start: self.b.start,
                burst: self.c.start,
                decline_end: self.c.end - 1,
            })
        }
    }
}

/// Simulate one path of the piecewise process.
///
/// Deterministic given `cfg.seed`; the emitted series has exactly `cfg.t`
/// observations starting at `y_0` in January 2005 (the calendar anchor is
/// arbitrary and only gives change points a month to be reported against).
pub fn simulate_path(cfg: &DgpConfig) -> Result<(TimeSeries, Option<PhaseTruth>)> {
    cfg.validate()?;
    let mut rng = substream(cfg.seed, 0);
    let eps = egarch_draws(&cfg.egarch, cfg.t - 1, &mut rng).eps;
    let drift = cfg.a * (cfg.t as f64).powf(-cfg.eta);
    let delta = cfg.delta();
    let gamma = cfg.gamma();
    let mut y = Vec::with_capacity(cfg.t);
    y.push(cfg.y0);
    for t in 1..cfg.t {
        let prev = y[t - 1];
        let level = if cfg.b.contains(t) {
            delta * prev
        } else if cfg.c.contains(t) {
            gamma * prev
        } else {
            drift + prev
        };
        y.push(level + eps[t - 1]);
    }
    let start = Month::new(2005, 1).expect("static month");
    let series = TimeSeries::new(format!("sim_{}", cfg.pattern.label()), start, y)?;
    Ok((series, cfg.truth()))
}
