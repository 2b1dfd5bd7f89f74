//! Spatial pooler with global inhibition and no boosting.
//!
//! Each column owns a fixed random potential pool over the input bits with
//! one permanence per potential synapse. The `k` columns with the highest
//! count of connected synapses on active input bits win; winners move their
//! permanences toward the current input.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpatialPoolerConfig {
    pub columns: usize,
    pub potential_fraction: f64,
    pub perm_connected: f64,
    pub perm_inc: f64,
    pub perm_dec: f64,
    pub sparsity: f64,
}

impl Default for SpatialPoolerConfig {
    fn default() -> Self {
        SpatialPoolerConfig {
            columns: 2048,
            potential_fraction: 0.8,
            perm_connected: 0.2,
            perm_inc: 0.03,
            perm_dec: 0.015,
            sparsity: 0.02,
        }
    }
}

impl SpatialPoolerConfig {
    pub fn active_columns(&self) -> usize {
        (self.sparsity * self.columns as f64).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.columns == 0 {
            return Err(Error::param("sp.columns", "must be >= 1"));
        }
        if !(self.potential_fraction > 0.0 && self.potential_fraction <= 1.0) {
            return Err(Error::param("sp.potential_fraction", "must be in (0, 1]"));
        }
        if !(self.perm_connected > 0.0 && self.perm_connected < 1.0) {
            return Err(Error::param("sp.perm_connected", "must be in (0, 1)"));
        }
        if !(self.sparsity > 0.0 && self.sparsity < 1.0) || self.active_columns() == 0 {
            return Err(Error::param("sp.sparsity", "must select at least one column"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SpatialPooler<T: Scalar> {
    cfg: SpatialPoolerConfig,
    input_size: usize,
    pool_size: usize,
    /// `columns × pool_size` input indices, row-major by column.
    potential: Vec<u32>,
    /// Permanence of each potential synapse, same layout.
    perms: Vec<T>,
    /// For each input bit, the flat synapse slots that sample it.
    by_input: Vec<Vec<u32>>,
    /// Fixed per-column rank used to break overlap ties.
    tie_rank: Vec<u32>,
}

impl<T: Scalar> SpatialPooler<T> {
    pub fn new(cfg: SpatialPoolerConfig, input_size: usize, rng: &mut SeededRng) -> Result<Self> {
        cfg.validate()?;
        if input_size == 0 {
            return Err(Error::param("sp input size", "must be >= 1"));
        }
        let pool_size = ((cfg.potential_fraction * input_size as f64).round() as usize).clamp(1, input_size);
        let mut potential = Vec::with_capacity(cfg.columns * pool_size);
        let mut perms = Vec::with_capacity(cfg.columns * pool_size);
        let mut by_input = vec![Vec::new(); input_size];
        for _ in 0..cfg.columns {
            let mut pool: Vec<usize> = sample(rng, input_size, pool_size).into_vec();
            pool.sort_unstable();
            for i in pool {
                by_input[i].push(potential.len() as u32);
                potential.push(i as u32);
                let p = rng.random_range(cfg.perm_connected - 0.1..cfg.perm_connected + 0.1);
                perms.push(T::lit(p.clamp(0.0, 1.0)));
            }
        }
        let mut tie_rank: Vec<u32> = (0..cfg.columns as u32).collect();
        for i in (1..tie_rank.len()).rev() {
            let j = rng.random_range(0..=i);
            tie_rank.swap(i, j);
        }
        Ok(SpatialPooler { cfg, input_size, pool_size, potential, perms, by_input, tie_rank })
    }

    pub fn config(&self) -> &SpatialPoolerConfig {
        &self.cfg
    }

    pub fn columns(&self) -> usize {
        self.cfg.columns
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    /// Connected-synapse overlap of every column with the active input bits.
    pub fn overlaps(&self, active_input: &[usize]) -> Vec<u32> {
        let connected = T::lit(self.cfg.perm_connected);
        let mut overlap = vec![0u32; self.cfg.columns];
        for &i in active_input {
            for &slot in &self.by_input[i] {
                if self.perms[slot as usize] >= connected {
                    overlap[slot as usize / self.pool_size] += 1;
                }
            }
        }
        overlap
    }

    /// Sorted indices of the winning columns.
    pub fn compute(&mut self, active_input: &[usize], learn: bool) -> Vec<usize> {
        let overlap = self.overlaps(active_input);
        let mut candidates: Vec<usize> = (0..self.cfg.columns).filter(|&c| overlap[c] > 0).collect();
        candidates.sort_unstable_by(|&a, &b| overlap[b].cmp(&overlap[a]).then(self.tie_rank[a].cmp(&self.tie_rank[b])));
        candidates.truncate(self.cfg.active_columns());
        candidates.sort_unstable();

        if learn {
            let (inc, dec) = (T::lit(self.cfg.perm_inc), T::lit(self.cfg.perm_dec));
            let mut on = vec![false; self.input_size];
            for &i in active_input {
                on[i] = true;
            }
            for &c in &candidates {
                let base = c * self.pool_size;
                for slot in base..base + self.pool_size {
                    let p = &mut self.perms[slot];
                    *p = if on[self.potential[slot] as usize] { *p + inc } else { *p - dec };
                    *p = p.max(T::zero()).min(T::one());
                }
            }
        }
        candidates
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn small() -> SpatialPoolerConfig {
        SpatialPoolerConfig { columns: 256, sparsity: 0.04, ..Default::default() }
    }

    #[test]
    fn output_has_target_sparsity() {
        let mut sp = SpatialPooler::<f64>::new(small(), 100, &mut seeded(1)).unwrap();
        let input: Vec<usize> = (30..51).collect();
        let active = sp.compute(&input, true);
        assert_eq!(active.len(), 10);
        assert!(active.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn similar_inputs_share_columns() {
        let mut sp = SpatialPooler::<f32>::new(SpatialPoolerConfig::default(), 150, &mut seeded(2)).unwrap();
        let a = sp.compute(&(40..61).collect::<Vec<_>>(), false);
        let b = sp.compute(&(41..62).collect::<Vec<_>>(), false);
        let far = sp.compute(&(120..141).collect::<Vec<_>>(), false);
        let shared = |x: &[usize], y: &[usize]| x.iter().filter(|c| y.contains(c)).count();
        assert!(shared(&a, &b) > shared(&a, &far));
        assert!(shared(&a, &b) * 2 > a.len());
    }

    #[test]
    fn learning_stabilizes_a_repeated_input() {
        let mut sp = SpatialPooler::<f64>::new(small(), 100, &mut seeded(3)).unwrap();
        let input: Vec<usize> = (10..31).collect();
        let first = sp.compute(&input, true);
        for _ in 0..20 {
            sp.compute(&input, true);
        }
        let later = sp.compute(&input, true);
        assert_eq!(first, later);
    }

    #[test]
    fn rejects_zero_active_columns() {
        let cfg = SpatialPoolerConfig { columns: 10, sparsity: 0.01, ..Default::default() };
        assert!(SpatialPooler::<f64>::new(cfg, 10, &mut seeded(0)).is_err());
    }
}
