use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const SIGMA_FLOOR: f64 = 1e-6;
pub const DEFAULT_EPSILON: f64 = 1e-5;

/// Upper tail probability of the standard normal.
pub fn q_function(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

pub fn likelihood_from_z(z: f64) -> f64 {
    (1.0 - q_function(z)).clamp(0.0, 1.0)
}

/// Inclusive threshold test `likelihood >= 1 - epsilon`.
pub fn is_anomalous<T: Scalar>(likelihood: T, epsilon: T) -> bool {
    likelihood >= T::one() - epsilon
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct LikelihoodConfig {
    pub window: usize,
    pub short_window: usize,
}

impl Default for LikelihoodConfig {
    fn default() -> Self {
        LikelihoodConfig { window: 4000, short_window: 10 }
    }
}

impl LikelihoodConfig {
    pub fn validate(&self) -> Result<()> {
        if self.short_window == 0 || self.short_window >= self.window {
            return Err(Error::param(
                "likelihood windows",
                format!("need 1 <= short ({}) < long ({})", self.short_window, self.window),
            ));
        }
        Ok(())
    }
}

/// Gaussian-tail likelihood over a ring buffer of raw scores. The long
/// window grows until it holds `window` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct AnomalyLikelihood<T: Scalar> {
    cfg: LikelihoodConfig,
    history: VecDeque<T>,
}

impl<T: Scalar> AnomalyLikelihood<T> {
    pub fn new(cfg: LikelihoodConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(AnomalyLikelihood { cfg, history: VecDeque::with_capacity(cfg.window.min(4096)) })
    }

    pub fn config(&self) -> &LikelihoodConfig {
        &self.cfg
    }

    pub fn len(&self) -> usize {
        self.history.len()
    }

    pub fn is_empty(&self) -> bool {
        self.history.is_empty()
    }

    /// Long-window mean and floored population standard deviation.
    pub fn long_stats(&self) -> (f64, f64) {
        let n = self.history.len().max(1) as f64;
        let mean = self.history.iter().map(|x| x.as_f64()).sum::<f64>() / n;
        let var = self.history.iter().map(|x| (x.as_f64() - mean).powi(2)).sum::<f64>() / n;
        (mean, var.sqrt().max(SIGMA_FLOOR))
    }

    pub fn short_mean(&self) -> f64 {
        let k = self.cfg.short_window.min(self.history.len()).max(1);
        self.history.iter().rev().take(k).map(|x| x.as_f64()).sum::<f64>() / k as f64
    }

    pub fn update(&mut self, raw: T) -> T {
        if self.history.len() == self.cfg.window {
            self.history.pop_front();
        }
        self.history.push_back(raw);
        let (mean, sd) = self.long_stats();
        T::lit(likelihood_from_z((self.short_mean() - mean) / sd))
    }
}
