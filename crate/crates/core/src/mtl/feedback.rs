use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::model::MtlModel;
use super::train::{train, Dataset, LabeledWindow, TrainConfig, TrainReport};
use crate::error::Result;
use crate::scalar::Scalar;
use crate::trip::{FeatureVector, IndicatorVector};

pub const DEFAULT_GAP: f64 = 0.1;
pub const QUERY_SPAN_S: f64 = 300.0;

/// Ask the commuter when the two most probable levels are closer than
/// `gap_threshold`.
pub fn should_query<T: Scalar>(iv: &IndicatorVector<T>, gap_threshold: T) -> bool {
    iv.top_gap() < gap_threshold
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Query {
    pub commuter_id: String,
    pub trip_id: String,
    pub window_index: usize,
    /// Window start, seconds since trip start.
    pub t: f64,
    pub fv: FeatureVector,
}

/// Pending and answered comfort queries. At most one query is ever raised
/// per trip and 5-minute span.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FeedbackQueue {
    pub pending: Vec<Query>,
    pub answered: Vec<(Query, u8)>,
    asked: BTreeSet<(String, u64)>,
}

impl FeedbackQueue {
    pub fn new() -> Self {
        Self::default()
    }

    /// Raises `query` if the indicator is ambiguous and its span has not
    /// been asked yet. Returns whether it was queued.
    pub fn offer<T: Scalar>(&mut self, query: Query, iv: &IndicatorVector<T>, gap_threshold: T) -> bool {
        if !should_query(iv, gap_threshold) {
            return false;
        }
        let span = (query.t.max(0.0) / QUERY_SPAN_S) as u64;
        if !self.asked.insert((query.trip_id.clone(), span)) {
            return false;
        }
        self.pending.push(query);
        true
    }

    /// Resolves pending queries through `oracle`; unanswered ones stay.
    pub fn answer_with(&mut self, mut oracle: impl FnMut(&Query) -> Option<u8>) -> usize {
        let before = self.answered.len();
        let mut still = Vec::new();
        for q in std::mem::take(&mut self.pending) {
            match oracle(&q).filter(|l| (1..=5).contains(l)) {
                Some(level) => self.answered.push((q, level)),
                None => still.push(q),
            }
        }
        self.pending = still;
        self.answered.len() - before
    }

    pub fn take_answered(&mut self) -> Dataset {
        let mut d = Dataset::default();
        for (q, level) in self.answered.drain(..) {
            d.push(&q.commuter_id, LabeledWindow { trip_id: q.trip_id, window_index: q.window_index, fv: q.fv, level });
        }
        d
    }
}

/// Appends answered labels to `dataset` and retrains from the current
/// parameters. Returns `None` and leaves the model untouched when nothing
/// was answered.
pub fn retrain<T: Scalar>(
    model: &mut MtlModel<T>,
    dataset: &mut Dataset,
    queue: &mut FeedbackQueue,
    val: &Dataset,
    cfg: &TrainConfig,
) -> Result<Option<TrainReport>> {
    if queue.answered.is_empty() {
        return Ok(None);
    }
    dataset.extend(queue.take_answered());
    train(model, dataset, val, cfg).map(Some)
}
