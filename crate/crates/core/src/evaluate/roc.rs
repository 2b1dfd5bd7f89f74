use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::trip::IndicatorVector;

/// Average ranks (1-based) with ties sharing the mean of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i + 1;
        while j < idx.len() && values[idx[j]] == values[idx[i]] {
            j += 1;
        }
        let r = (i + j + 1) as f64 / 2.0;
        for &k in &idx[i..j] {
            ranks[k] = r;
        }
        i = j;
    }
    ranks
}

/// Probability that a random positive scores above a random negative,
/// ties counting one half.
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::invalid("labels", format!("{} labels for {} scores", labels.len(), scores.len())));
    }
    if let Some(&bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(Error::NonFinite(bad));
    }
    let pos = labels.iter().filter(|&&l| l).count();
    let neg = labels.len() - pos;
    if pos == 0 {
        return Err(Error::UndefinedAuc("no positive samples"));
    }
    if neg == 0 {
        return Err(Error::UndefinedAuc("no negative samples"));
    }
    let ranks = average_ranks(scores);
    let rank_sum: f64 = ranks.iter().zip(labels).filter(|(_, &l)| l).map(|(r, _)| r).sum();
    let (p, n) = (pos as f64, neg as f64);
    let u = rank_sum - p * (p + 1.0) / 2.0;
    Ok(u / (p * n))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RocResult {
    pub per_class: BTreeMap<u8, f64>,
    pub macro_auc: f64,
    /// Levels absent from the labels, hence without an AUC.
    pub skipped: Vec<u8>,
}

/// One-vs-all AUC per comfort level, scoring each level by its own
/// probability, and the macro average over the levels present.
pub fn multiclass_auc<T: Scalar>(indicators: &[IndicatorVector<T>], levels: &[u8]) -> Result<RocResult> {
    if indicators.len() != levels.len() {
        return Err(Error::invalid("levels", format!("{} levels for {} indicators", levels.len(), indicators.len())));
    }
    if let Some(&l) = levels.iter().find(|l| !(1..=5).contains(*l)) {
        return Err(Error::OutOfRange { what: "level", value: i64::from(l) });
    }
    let mut res = RocResult::default();
    for level in 1..=5u8 {
        let labels: Vec<bool> = levels.iter().map(|&l| l == level).collect();
        if !labels.contains(&true) {
            res.skipped.push(level);
            continue;
        }
        let scores: Vec<f64> = indicators.iter().map(|iv| iv.prob(level).as_f64()).collect();
        res.per_class.insert(level, roc_auc(&scores, &labels)?);
    }
    if res.per_class.len() < 2 {
        return Err(Error::UndefinedAuc("fewer than two distinct levels"));
    }
    res.macro_auc = res.per_class.values().sum::<f64>() / res.per_class.len() as f64;
    Ok(res)
}
