//! Temporal memory: cells within columns learn distal segments onto the
//! previous step's winner cells; cells with an active segment are
//! depolarized and their columns form the prediction for the next input.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TemporalMemoryConfig {
    pub cells_per_column: usize,
    pub activation_threshold: usize,
    pub initial_perm: f64,
    pub perm_connected: f64,
    pub min_threshold: usize,
    pub max_new_synapses: usize,
    pub perm_inc: f64,
    pub perm_dec: f64,
    pub predicted_segment_dec: f64,
    pub max_segments_per_cell: usize,
    pub max_synapses_per_segment: usize,
}

impl Default for TemporalMemoryConfig {
    fn default() -> Self {
        TemporalMemoryConfig {
            cells_per_column: 32,
            activation_threshold: 13,
            initial_perm: 0.21,
            perm_connected: 0.5,
            min_threshold: 10,
            max_new_synapses: 20,
            perm_inc: 0.1,
            perm_dec: 0.1,
            predicted_segment_dec: 0.0,
            max_segments_per_cell: 128,
            max_synapses_per_segment: 32,
        }
    }
}

impl TemporalMemoryConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cells_per_column == 0 {
            return Err(Error::param("tm.cells_per_column", "must be >= 1"));
        }
        let bound = self.max_synapses_per_segment;
        for (name, v) in [
            ("tm.activation_threshold", self.activation_threshold),
            ("tm.min_threshold", self.min_threshold),
            ("tm.max_new_synapses", self.max_new_synapses),
        ] {
            if v > bound {
                return Err(Error::param(name, format!("{v} exceeds synapses per segment bound {bound}")));
            }
        }
        if self.max_segments_per_cell == 0 || bound == 0 {
            return Err(Error::param("tm segment bounds", "must be >= 1"));
        }
        for (name, v) in [
            ("tm.initial_perm", self.initial_perm),
            ("tm.perm_connected", self.perm_connected),
            ("tm.perm_inc", self.perm_inc),
            ("tm.perm_dec", self.perm_dec),
            ("tm.predicted_segment_dec", self.predicted_segment_dec),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::param(name, format!("{v} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
struct Synapse<T: Scalar> {
    presyn: u32,
    perm: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
struct Segment<T: Scalar> {
    cell: u32,
    synapses: Vec<Synapse<T>>,
    last_used: u64,
    alive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct TemporalMemory<T: Scalar> {
    cfg: TemporalMemoryConfig,
    columns: usize,
    segments: Vec<Segment<T>>,
    free_segments: Vec<u32>,
    /// Destroyed during the current step; recycled once the step ends.
    pending_free: Vec<u32>,
    cell_segments: Vec<Vec<u32>>,
    /// Segments holding a synapse from each presynaptic cell.
    presyn_segments: Vec<Vec<u32>>,
    active_cells: Vec<u32>,
    winner_cells: Vec<u32>,
    active_segments: Vec<u32>,
    matching_segments: Vec<u32>,
    /// Active potential synapse count per segment, from the last step.
    potential_count: Vec<u32>,
    predicted_columns: Vec<usize>,
    iteration: u64,
    rng: SeededRng,
}

impl<T: Scalar> TemporalMemory<T> {
    pub fn new(cfg: TemporalMemoryConfig, columns: usize, rng: SeededRng) -> Result<Self> {
        cfg.validate()?;
        let cells = columns * cfg.cells_per_column;
        Ok(TemporalMemory {
            cfg,
            columns,
            segments: Vec::new(),
            free_segments: Vec::new(),
            pending_free: Vec::new(),
            cell_segments: vec![Vec::new(); cells],
            presyn_segments: vec![Vec::new(); cells],
            active_cells: Vec::new(),
            winner_cells: Vec::new(),
            active_segments: Vec::new(),
            matching_segments: Vec::new(),
            potential_count: Vec::new(),
            predicted_columns: Vec::new(),
            iteration: 0,
            rng,
        })
    }

    pub fn config(&self) -> &TemporalMemoryConfig {
        &self.cfg
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    /// Columns holding a depolarized cell; the prediction for the next step.
    pub fn predicted_columns(&self) -> &[usize] {
        &self.predicted_columns
    }

    pub fn active_cells(&self) -> &[u32] {
        &self.active_cells
    }

    pub fn winner_cells(&self) -> &[u32] {
        &self.winner_cells
    }

    pub fn segment_count(&self) -> usize {
        self.segments.len() - self.free_segments.len() - self.pending_free.len()
    }

    pub fn reset(&mut self) {
        self.active_cells.clear();
        self.winner_cells.clear();
        self.active_segments.clear();
        self.matching_segments.clear();
        self.predicted_columns.clear();
    }

    fn column_of_cell(&self, cell: u32) -> usize {
        cell as usize / self.cfg.cells_per_column
    }

    fn column_of_segment(&self, seg: u32) -> usize {
        self.column_of_cell(self.segments[seg as usize].cell)
    }

    /// Advance one step over sorted `active_columns`.
    pub fn compute(&mut self, active_columns: &[usize], learn: bool) {
        let prev_active = std::mem::take(&mut self.active_cells);
        let prev_winners = std::mem::take(&mut self.winner_cells);
        let mut prev_on = vec![false; self.cell_segments.len()];
        for &c in &prev_active {
            prev_on[c as usize] = true;
        }

        let active_segments = std::mem::take(&mut self.active_segments);
        let matching_segments = std::mem::take(&mut self.matching_segments);
        let mut next_active = Vec::new();
        let mut next_winners = Vec::new();

        // Both segment lists are sorted by column, so walk them alongside.
        let (mut ai, mut mi) = (0usize, 0usize);
        for &col in active_columns {
            while ai < active_segments.len() && self.column_of_segment(active_segments[ai]) < col {
                ai += 1;
            }
            while mi < matching_segments.len() && self.column_of_segment(matching_segments[mi]) < col {
                self.punish(matching_segments[mi], &prev_on, learn);
                mi += 1;
            }
            let a_start = ai;
            while ai < active_segments.len() && self.column_of_segment(active_segments[ai]) == col {
                ai += 1;
            }
            let m_start = mi;
            while mi < matching_segments.len() && self.column_of_segment(matching_segments[mi]) == col {
                mi += 1;
            }

            if ai > a_start {
                for &seg in &active_segments[a_start..ai] {
                    let cell = self.segments[seg as usize].cell;
                    if next_active.last() != Some(&cell) {
                        next_active.push(cell);
                        next_winners.push(cell);
                    }
                    if learn {
                        self.adapt(seg, &prev_on);
                        let n = self.cfg.max_new_synapses.saturating_sub(self.potential_count[seg as usize] as usize);
                        self.grow(seg, &prev_winners, n);
                    }
                }
            } else {
                self.burst(col, &matching_segments[m_start..mi], &prev_on, &prev_winners, learn, &mut next_active, &mut next_winners);
            }
        }
        while mi < matching_segments.len() {
            self.punish(matching_segments[mi], &prev_on, learn);
            mi += 1;
        }

        self.active_cells = next_active;
        self.winner_cells = next_winners;
        self.activate_dendrites(learn);
        self.free_segments.append(&mut self.pending_free);
        self.iteration += 1;
    }

    #[allow(clippy::too_many_arguments)]
    fn burst(
        &mut self,
        col: usize,
        matching: &[u32],
        prev_on: &[bool],
        prev_winners: &[u32],
        learn: bool,
        next_active: &mut Vec<u32>,
        next_winners: &mut Vec<u32>,
    ) {
        let first = (col * self.cfg.cells_per_column) as u32;
        next_active.extend(first..first + self.cfg.cells_per_column as u32);

        let best = matching
            .iter()
            .copied()
            .max_by(|&a, &b| self.potential_count[a as usize].cmp(&self.potential_count[b as usize]).then(b.cmp(&a)));
        if let Some(seg) = best {
            next_winners.push(self.segments[seg as usize].cell);
            if learn {
                self.adapt(seg, prev_on);
                let n = self.cfg.max_new_synapses.saturating_sub(self.potential_count[seg as usize] as usize);
                self.grow(seg, prev_winners, n);
            }
            return;
        }

        let winner = self.least_used_cell(first);
        next_winners.push(winner);
        if learn && !prev_winners.is_empty() {
            let seg = self.create_segment(winner);
            self.grow(seg, prev_winners, self.cfg.max_new_synapses);
        }
    }

    fn least_used_cell(&mut self, first: u32) -> u32 {
        let cells = first..first + self.cfg.cells_per_column as u32;
        let fewest = cells.clone().map(|c| self.cell_segments[c as usize].len()).min().unwrap_or(0);
        let candidates: Vec<u32> = cells.filter(|&c| self.cell_segments[c as usize].len() == fewest).collect();
        candidates[self.rng.random_range(0..candidates.len())]
    }

    fn punish(&mut self, seg: u32, prev_on: &[bool], learn: bool) {
        if !learn || self.cfg.predicted_segment_dec <= 0.0 || !self.segments[seg as usize].alive {
            return;
        }
        let dec = T::lit(self.cfg.predicted_segment_dec);
        for syn in &mut self.segments[seg as usize].synapses {
            if prev_on[syn.presyn as usize] {
                syn.perm = (syn.perm - dec).max(T::zero());
            }
        }
        self.prune(seg);
    }

    fn adapt(&mut self, seg: u32, prev_on: &[bool]) {
        let (inc, dec) = (T::lit(self.cfg.perm_inc), T::lit(self.cfg.perm_dec));
        for syn in &mut self.segments[seg as usize].synapses {
            let p = if prev_on[syn.presyn as usize] { syn.perm + inc } else { syn.perm - dec };
            syn.perm = p.max(T::zero()).min(T::one());
        }
        self.prune(seg);
    }

    /// Drop synapses whose permanence reached zero; drop the segment if empty.
    fn prune(&mut self, seg: u32) {
        let eps = T::lit(1e-6);
        let dead: Vec<u32> = self.segments[seg as usize]
            .synapses
            .iter()
            .filter(|s| s.perm < eps)
            .map(|s| s.presyn)
            .collect();
        if dead.is_empty() {
            return;
        }
        self.segments[seg as usize].synapses.retain(|s| s.perm >= eps);
        for p in dead {
            remove_value(&mut self.presyn_segments[p as usize], seg);
        }
        if self.segments[seg as usize].synapses.is_empty() {
            self.destroy_segment(seg);
        }
    }

    fn create_segment(&mut self, cell: u32) -> u32 {
        while self.cell_segments[cell as usize].len() >= self.cfg.max_segments_per_cell {
            let lru = *self.cell_segments[cell as usize]
                .iter()
                .min_by_key(|&&s| (self.segments[s as usize].last_used, s))
                .expect("non-empty");
            self.destroy_segment(lru);
        }
        let seg = Segment { cell, synapses: Vec::new(), last_used: self.iteration, alive: true };
        let id = match self.free_segments.pop() {
            Some(id) => {
                self.segments[id as usize] = seg;
                id
            }
            None => {
                self.segments.push(seg);
                self.potential_count.push(0);
                (self.segments.len() - 1) as u32
            }
        };
        self.potential_count[id as usize] = 0;
        self.cell_segments[cell as usize].push(id);
        id
    }

    fn destroy_segment(&mut self, seg: u32) {
        let s = &mut self.segments[seg as usize];
        if !s.alive {
            return;
        }
        s.alive = false;
        let cell = s.cell;
        let synapses = std::mem::take(&mut s.synapses);
        for syn in synapses {
            remove_value(&mut self.presyn_segments[syn.presyn as usize], seg);
        }
        remove_value(&mut self.cell_segments[cell as usize], seg);
        self.pending_free.push(seg);
    }

    fn grow(&mut self, seg: u32, candidates: &[u32], n: usize) {
        if n == 0 || !self.segments[seg as usize].alive {
            return;
        }
        let mut pool: Vec<u32> = {
            let existing = &self.segments[seg as usize].synapses;
            candidates.iter().copied().filter(|c| !existing.iter().any(|s| s.presyn == *c)).collect()
        };
        let n = n.min(pool.len());
        if n == 0 {
            return;
        }
        // Partial Fisher-Yates: the first n entries become the sample.
        for i in 0..n {
            let j = self.rng.random_range(i..pool.len());
            pool.swap(i, j);
        }
        pool.truncate(n);

        let overflow = (self.segments[seg as usize].synapses.len() + n).saturating_sub(self.cfg.max_synapses_per_segment);
        for _ in 0..overflow {
            let syns = &mut self.segments[seg as usize].synapses;
            let Some(weakest) = (0..syns.len()).min_by(|&a, &b| {
                syns[a].perm.partial_cmp(&syns[b].perm).unwrap_or(std::cmp::Ordering::Equal)
            }) else {
                break;
            };
            let removed = syns.remove(weakest);
            remove_value(&mut self.presyn_segments[removed.presyn as usize], seg);
        }

        let perm = T::lit(self.cfg.initial_perm);
        for presyn in pool {
            self.segments[seg as usize].synapses.push(Synapse { presyn, perm });
            self.presyn_segments[presyn as usize].push(seg);
        }
    }

    fn activate_dendrites(&mut self, learn: bool) {
        let connected = T::lit(self.cfg.perm_connected);
        let n = self.segments.len();
        let mut connected_count = vec![0u32; n];
        let mut potential = vec![0u32; n];
        let mut touched = Vec::new();
        for &cell in &self.active_cells {
            for &seg in &self.presyn_segments[cell as usize] {
                let s = &self.segments[seg as usize];
                if let Some(syn) = s.synapses.iter().find(|x| x.presyn == cell) {
                    if potential[seg as usize] == 0 {
                        touched.push(seg);
                    }
                    potential[seg as usize] += 1;
                    if syn.perm >= connected {
                        connected_count[seg as usize] += 1;
                    }
                }
            }
        }
        let key = |s: &u32| (self.segments[*s as usize].cell, *s);
        let mut active: Vec<u32> = touched
            .iter()
            .copied()
            .filter(|&s| connected_count[s as usize] as usize >= self.cfg.activation_threshold)
            .collect();
        active.sort_unstable_by_key(key);
        let mut matching: Vec<u32> = touched
            .iter()
            .copied()
            .filter(|&s| potential[s as usize] as usize >= self.cfg.min_threshold)
            .collect();
        matching.sort_unstable_by_key(key);

        if learn {
            for &s in &active {
                self.segments[s as usize].last_used = self.iteration;
            }
        }
        let mut predicted: Vec<usize> = active.iter().map(|&s| self.column_of_segment(s)).collect();
        predicted.dedup();
        self.predicted_columns = predicted;
        self.active_segments = active;
        self.matching_segments = matching;
        self.potential_count = potential;
    }
}

fn remove_value(v: &mut Vec<u32>, x: u32) {
    if let Some(i) = v.iter().position(|&y| y == x) {
        v.swap_remove(i);
    }
}
