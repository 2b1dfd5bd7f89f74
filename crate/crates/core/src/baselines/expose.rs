//! EXPoSE with exponential decay.
//!
//! Each value is z-scored with the running mean and standard deviation at
//! the time it arrives and stored. The similarity of a new point is the
//! decayed, normalized weighted mean of Gaussian kernel evaluations against
//! the stored points (weight `(1 − decay)^age`); the score is
//! `1 − similarity`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::stream::StreamingDetector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExposeConfig {
    pub decay: f64,
    pub gamma: f64,
    /// Stored points; older ones carry weight below `(1 − decay)^capacity`.
    pub capacity: usize,
}

impl Default for ExposeConfig {
    fn default() -> Self {
        ExposeConfig { decay: 0.01, gamma: 0.5, capacity: 4000 }
    }
}

impl ExposeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.decay > 0.0 && self.decay < 1.0) {
            return Err(Error::param("expose.decay", format!("{} outside (0, 1)", self.decay)));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::param("expose.gamma", "must be positive"));
        }
        if self.capacity == 0 {
            return Err(Error::param("expose.capacity", "must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Expose<T: Scalar> {
    cfg: ExposeConfig,
    /// z-scored history, oldest first.
    history: VecDeque<T>,
    n: u64,
    mean: f64,
    m2: f64,
}

impl<T: Scalar> Expose<T> {
    pub fn new(cfg: ExposeConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Expose { cfg, history: VecDeque::new(), n: 0, mean: 0.0, m2: 0.0 })
    }

    pub fn config(&self) -> &ExposeConfig {
        &self.cfg
    }

    fn standardize(&mut self, x: f64) -> f64 {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
        let sd = (self.m2 / self.n as f64).sqrt();
        if sd < 1e-12 {
            0.0
        } else {
            (x - self.mean) / sd
        }
    }

    pub fn step(&mut self, x: T) -> Result<T> {
        let xf = x.as_f64();
        if !xf.is_finite() {
            return Err(Error::NonFinite(xf));
        }
        let z = T::lit(self.standardize(xf));
        let keep = T::lit(1.0 - self.cfg.decay);
        let gamma = T::lit(self.cfg.gamma);
        let (mut weight, mut num, mut den) = (T::one(), T::zero(), T::zero());
        for &zi in self.history.iter().rev() {
            let d = z - zi;
            num += weight * (-gamma * d * d).exp();
            den += weight;
            weight *= keep;
        }
        let score = if den > T::zero() { T::one() - num / den } else { T::one() };

        if self.history.len() == self.cfg.capacity {
            self.history.pop_front();
        }
        self.history.push_back(z);
        Ok(score.max(T::zero()).min(T::one()))
    }
}

impl<T: Scalar> StreamingDetector<T> for Expose<T> {
    fn name(&self) -> &'static str {
        "expose"
    }

    fn score(&mut self, x: T) -> Result<T> {
        self.step(x)
    }
}
