//! Multinomial relative-entropy detector.
//!
//! The last `window` values are binned into a histogram and compared with
//! a set of hypotheses (bin-frequency profiles) through the G statistic
//! `2·W·KL(p̂‖q)`, which is asymptotically chi-square with `bins − 1`
//! degrees of freedom. A window within `chi_threshold` of its closest
//! hypothesis is merged into it; otherwise it opens a new candidate. A
//! candidate becomes an accepted (normal) hypothesis once it has matched
//! `accept_count` windows. The score is the chi-square CDF of the
//! statistic against the closest accepted hypothesis.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::stream::StreamingDetector;

/// Mixing weight of the uniform profile, keeping empty bins finite.
const PROFILE_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RelativeEntropyConfig {
    pub window: usize,
    pub bins: usize,
    pub chi_threshold: f64,
    pub min: f64,
    pub max: f64,
    pub accept_count: usize,
    pub max_hypotheses: usize,
}

impl Default for RelativeEntropyConfig {
    fn default() -> Self {
        RelativeEntropyConfig {
            window: 55,
            bins: 10,
            chi_threshold: 1.0,
            min: 0.0,
            max: 1.0,
            accept_count: 5,
            max_hypotheses: 64,
        }
    }
}

impl RelativeEntropyConfig {
    pub fn with_range(min: f64, max: f64) -> Self {
        RelativeEntropyConfig { min, max, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.bins < 2 || self.window <= self.bins {
            return Err(Error::param("re window/bins", format!("need window ({}) > bins ({}) >= 2", self.window, self.bins)));
        }
        if !self.min.is_finite() || !self.max.is_finite() || self.max <= self.min {
            return Err(Error::param("re range", format!("[{}, {}] is empty", self.min, self.max)));
        }
        if self.chi_threshold.is_nan() || self.chi_threshold < 0.0 {
            return Err(Error::param("re.chi_threshold", "must be >= 0"));
        }
        if self.accept_count == 0 || self.max_hypotheses == 0 {
            return Err(Error::param("re hypotheses", "accept_count and max_hypotheses must be >= 1"));
        }
        Ok(())
    }

    fn bin_of(&self, x: f64) -> usize {
        let frac = (x.clamp(self.min, self.max) - self.min) / (self.max - self.min);
        ((frac * self.bins as f64) as usize).min(self.bins - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
struct Hypothesis<T: Scalar> {
    profile: Vec<T>,
    support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct RelativeEntropy<T: Scalar> {
    cfg: RelativeEntropyConfig,
    values: VecDeque<usize>,
    counts: Vec<usize>,
    hypotheses: Vec<Hypothesis<T>>,
}

impl<T: Scalar> RelativeEntropy<T> {
    pub fn new(cfg: RelativeEntropyConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(RelativeEntropy { cfg, values: VecDeque::with_capacity(cfg.window), counts: vec![0; cfg.bins], hypotheses: Vec::new() })
    }

    pub fn config(&self) -> &RelativeEntropyConfig {
        &self.cfg
    }

    pub fn accepted(&self) -> usize {
        self.hypotheses.iter().filter(|h| h.support >= self.cfg.accept_count).count()
    }

    /// G statistic of the current window against `profile`.
    fn statistic(&self, profile: &[T]) -> T {
        let w = self.cfg.window as f64;
        let uniform = T::lit(PROFILE_FLOOR / self.cfg.bins as f64);
        let keep = T::lit(1.0 - PROFILE_FLOOR);
        let kl: T = self
            .counts
            .iter()
            .zip(profile)
            .filter(|(&c, _)| c > 0)
            .map(|(&c, &q)| {
                let p = T::lit(c as f64 / w);
                p * (p / (keep * q + uniform)).ln()
            })
            .sum();
        (T::lit(2.0 * w) * kl).max(T::zero())
    }

    pub fn step(&mut self, x: T) -> Result<T> {
        let xf = x.as_f64();
        if !xf.is_finite() {
            return Err(Error::NonFinite(xf));
        }
        let b = self.cfg.bin_of(xf);
        if self.values.len() == self.cfg.window {
            let old = self.values.pop_front().expect("full window");
            self.counts[old] -= 1;
        }
        self.values.push_back(b);
        self.counts[b] += 1;
        if self.values.len() < self.cfg.window {
            return Ok(T::zero());
        }

        let stats: Vec<T> = self.hypotheses.iter().map(|h| self.statistic(&h.profile)).collect();
        let accept = self.cfg.accept_count;
        let best_accepted = stats
            .iter()
            .zip(&self.hypotheses)
            .filter(|(_, h)| h.support >= accept)
            .map(|(&g, _)| g)
            .fold(None, |m: Option<T>, g| Some(m.map_or(g, |m| m.min(g))));

        let window: Vec<T> = self.counts.iter().map(|&c| T::lit(c as f64 / self.cfg.window as f64)).collect();
        let closest = (0..stats.len()).min_by(|&a, &b| stats[a].partial_cmp(&stats[b]).unwrap_or(std::cmp::Ordering::Equal));
        match closest {
            Some(i) if stats[i].as_f64() <= self.cfg.chi_threshold => {
                let h = &mut self.hypotheses[i];
                let n = T::from_usize_lossy(h.support);
                for (q, p) in h.profile.iter_mut().zip(&window) {
                    *q = (*q * n + *p) / (n + T::one());
                }
                h.support += 1;
            }
            _ => {
                if self.hypotheses.len() == self.cfg.max_hypotheses {
                    // evict the weakest candidate; accepted hypotheses stay
                    if let Some(i) = (0..self.hypotheses.len())
                        .filter(|&i| self.hypotheses[i].support < accept)
                        .min_by_key(|&i| self.hypotheses[i].support)
                    {
                        self.hypotheses.remove(i);
                    }
                }
                if self.hypotheses.len() < self.cfg.max_hypotheses {
                    // the very first window is taken as normal
                    let support = if self.hypotheses.is_empty() { accept } else { 1 };
                    self.hypotheses.push(Hypothesis { profile: window, support });
                }
            }
        }

        Ok(match best_accepted {
            None => T::zero(),
            Some(g) => T::lit(chi_square_cdf(g.as_f64(), self.cfg.bins - 1)),
        })
    }
}

impl<T: Scalar> StreamingDetector<T> for RelativeEntropy<T> {
    fn name(&self) -> &'static str {
        "re"
    }

    fn score(&mut self, x: T) -> Result<T> {
        self.step(x)
    }
}

pub fn chi_square_cdf(x: f64, dof: usize) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    ChiSquared::new(dof as f64).expect("dof >= 1").cdf(x).clamp(0.0, 1.0)
}
