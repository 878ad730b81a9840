use boombust_core::rng::substream;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

/// Coefficients of an EGARCH(1,1) log-variance recursion
///
/// ```text
/// log σ_t² = ω + α (|z_{t−1}| − E|z|) + γ z_{t−1} + β log σ_{t−1}²
/// ```
///
/// with `z` i.i.d. standard normal, `E|z| = √(2/π)`, and innovations
/// `ε_t = σ_t z_t`. A negative `γ` makes volatility react more strongly to
/// negative shocks (leverage).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EgarchParams {
    pub omega: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub beta: f64,
}

impl EgarchParams {
    pub fn new(omega: f64, alpha: f64, gamma: f64, beta: f64) -> Result<Self> {
        let p = Self {
            omega,
            alpha,
            gamma,
            beta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega", self.omega),
            ("alpha", self.alpha),
            ("gamma", self.gamma),
            ("beta", self.beta),
        ] {
            if !v.is_finite() {
                return Err(SimError::InvalidEgarch(format!("{name} = {v}")));
            }
        }
        if self.beta.abs() >= 1.0 {
            return Err(SimError::InvalidEgarch(format!(
                "|beta| = {} >= 1, log-variance recursion is not stationary",
                self.beta.abs()
            )));
        }
        Ok(())
    }

    /// Unconditional mean of `log σ_t²`, used to initialize the recursion.
    pub fn unconditional_log_var(&self) -> f64 {
        self.omega / (1.0 - self.beta)
    }
}

impl Default for EgarchParams {
    /// Leverage-bearing, highly persistent volatility with an unconditional
    /// innovation scale of `exp(ω/(2(1−β))) = 0.50` — large enough that
    /// level-based episode stamps are genuinely noise-perturbed, small
    /// enough that regime shifts stay separated in return space.
    fn default() -> Self {
        Self {
            omega: -0.07,
            alpha: 0.2,
            gamma: -0.15,
            beta: 0.95,
        }
    }
}

/// One step of the recursion plus the draw it conditions on. The path
/// generator consumes only `eps`; `z` and `log_var` expose the recursion
/// state so its law can be checked directly.
pub(crate) struct EgarchDraws {
    pub eps: Vec<f64>,
    #[cfg_attr(not(test), allow(dead_code))]
    pub z: Vec<f64>,
    #[cfg_attr(not(test), allow(dead_code))]
    pub log_var: Vec<f64>,
}

pub(crate) fn egarch_draws(p: &EgarchParams, n: usize, rng: &mut ChaCha8Rng) -> EgarchDraws {
    let e_abs_z = (2.0 / std::f64::consts::PI).sqrt();
    let mut eps = Vec::with_capacity(n);
    let mut z = Vec::with_capacity(n);
    let mut log_var = Vec::with_capacity(n);
    let mut lv = p.unconditional_log_var();
    for t in 0..n {
        if t > 0 {
            let zp: f64 = z[t - 1];
            lv = p.omega + p.alpha * (zp.abs() - e_abs_z) + p.gamma * zp + p.beta * log_var[t - 1];
        }
        let zt: f64 = rng.sample(StandardNormal);
        log_var.push(lv);
        z.push(zt);
        eps.push((0.5 * lv).exp() * zt);
    }
    EgarchDraws { eps, z, log_var }
}

/// Draw `n` EGARCH(1,1) innovations `ε_t = σ_t z_t`.
///
/// The log-variance starts at its unconditional mean `ω / (1 − β)`; the
/// sequence is a pure function of `(p, n, seed)`.
pub fn egarch_path(p: &EgarchParams, n: usize, seed: u64) -> Result<Vec<f64>> {
    p.validate()?;
    if n == 0 {
        return Err(SimError::InvalidEgarch("need n >= 1 innovations".into()));
    }
    let mut rng = substream(seed, 0);
    Ok(egarch_draws(p, n, &mut rng).eps)
}
