use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::model::{Head, MtlModel, Normalization, INPUT_DIM, LEVELS};
use crate::error::{Error, Result};
use crate::rng::seeded;
use crate::scalar::Scalar;
use crate::trip::FeatureVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledWindow {
    pub trip_id: String,
    pub window_index: usize,
    pub fv: FeatureVector,
    pub level: u8,
}

/// Labelled windows grouped by commuter.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub tasks: BTreeMap<String, Vec<LabeledWindow>>,
}

impl Dataset {
    pub fn push(&mut self, commuter: &str, w: LabeledWindow) {
        self.tasks.entry(commuter.to_string()).or_default().push(w);
    }

    pub fn len(&self) -> usize {
        self.tasks.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn extend(&mut self, other: Dataset) {
        for (c, ws) in other.tasks {
            self.tasks.entry(c).or_default().extend(ws);
        }
    }

    /// Only the given commuter's windows.
    pub fn only(&self, commuter: &str) -> Dataset {
        let mut d = Dataset::default();
        if let Some(ws) = self.tasks.get(commuter) {
            d.tasks.insert(commuter.to_string(), ws.clone());
        }
        d
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &LabeledWindow)> {
        self.tasks.iter().flat_map(|(c, ws)| ws.iter().map(move |w| (c.as_str(), w)))
    }

    /// Splits each commuter's trips into train / validation / test by
    /// whole trips. Trip order is shuffled with `seed`.
    pub fn split_by_trip(&self, fractions: [f64; 3], seed: u64) -> Result<(Dataset, Dataset, Dataset)> {
        check_fractions(fractions)?;
        let mut rng = seeded(seed);
        let mut parts = (Dataset::default(), Dataset::default(), Dataset::default());
        for (c, ws) in &self.tasks {
            let mut trips: Vec<&str> = ws.iter().map(|w| w.trip_id.as_str()).collect::<BTreeSet<_>>().into_iter().collect();
            trips.shuffle(&mut rng);
            let n = trips.len() as f64;
            let n_train = (fractions[0] * n).round() as usize;
            let n_val = ((fractions[0] + fractions[1]) * n).round() as usize - n_train;
            let bucket: BTreeMap<&str, usize> = trips
                .iter()
                .enumerate()
                .map(|(i, t)| (*t, if i < n_train { 0 } else if i < n_train + n_val { 1 } else { 2 }))
                .collect();
            for w in ws {
                let target = match bucket[w.trip_id.as_str()] {
                    0 => &mut parts.0,
                    1 => &mut parts.1,
                    _ => &mut parts.2,
                };
                target.push(c, w.clone());
            }
        }
        Ok(parts)
    }
}

fn check_fractions(f: [f64; 3]) -> Result<()> {
    if f.iter().any(|&x| !(0.0..=1.0).contains(&x)) || (f.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::param("split", format!("{f:?} must be non-negative and sum to 1")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub split: [f64; 3],
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { learning_rate: 1e-2, epochs: 200, batch_size: 32, seed: 0, split: [0.6, 0.2, 0.2] }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::param("learning_rate", "must be positive"));
        }
        if self.batch_size == 0 {
            return Err(Error::param("batch_size", "must be >= 1"));
        }
        check_fractions(self.split)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub train_loss: Vec<f64>,
    /// NaN when there is no validation data.
    pub val_loss: Vec<f64>,
}

/// Gradient of the loss with respect to every parameter, laid out like
/// the model.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients<T: Scalar> {
    pub w1: Vec<T>,
    pub b1: Vec<T>,
    pub heads: Vec<Head<T>>,
}

impl<T: Scalar> Gradients<T> {
    /// Same order as [`MtlModel::parameters`].
    pub fn flatten(&self) -> Vec<T> {
        let mut v = self.w1.clone();
        v.extend(&self.b1);
        for h in &self.heads {
            v.extend(&h.w);
            v.extend(&h.b);
        }
        v
    }
}

/// One training example: head index, network input, level index 0..5.
pub type Example<T> = (usize, [T; INPUT_DIM], usize);

/// Summed cross-entropy over `batch` divided by `normalizer`, and its
/// gradient. A fixed normalizer keeps each head's gradient a function of
/// its own examples only.
pub fn loss_and_gradients<T: Scalar>(model: &MtlModel<T>, batch: &[Example<T>], normalizer: T) -> (T, Gradients<T>) {
    let hd = model.hidden;
    let mut g = Gradients {
        w1: vec![T::zero(); model.w1.len()],
        b1: vec![T::zero(); hd],
        heads: model.heads.iter().map(|_| Head { w: vec![T::zero(); LEVELS * hd], b: [T::zero(); LEVELS] }).collect(),
    };
    let mut loss = T::zero();
    let mut dh = vec![T::zero(); hd];
    for (head, x, y) in batch {
        let tr = model.trace(*head, x);
        loss -= tr.p[*y].max(T::min_positive_value()).ln();
        let mut dz = tr.p;
        dz[*y] -= T::one();
        let w2 = &model.heads[*head].w;
        let gh = &mut g.heads[*head];
        dh.iter_mut().for_each(|v| *v = T::zero());
        for k in 0..LEVELS {
            gh.b[k] += dz[k];
            for j in 0..hd {
                gh.w[k * hd + j] += dz[k] * tr.h[j];
                dh[j] += w2[k * hd + j] * dz[k];
            }
        }
        for (j, &dhj) in dh.iter().enumerate() {
            if tr.pre[j] > T::zero() {
                g.b1[j] += dhj;
                for (i, xi) in x.iter().enumerate() {
                    g.w1[j * INPUT_DIM + i] += dhj * *xi;
                }
            }
        }
    }
    let scale = T::one() / normalizer;
    g.w1.iter_mut().chain(g.b1.iter_mut()).for_each(|v| *v *= scale);
    for h in &mut g.heads {
        h.w.iter_mut().for_each(|v| *v *= scale);
        h.b.iter_mut().for_each(|v| *v *= scale);
    }
    (loss * scale, g)
}

fn apply<T: Scalar>(model: &mut MtlModel<T>, g: &Gradients<T>, lr: T) {
    for (w, d) in model.w1.iter_mut().zip(&g.w1) {
        *w -= lr * *d;
    }
    for (b, d) in model.b1.iter_mut().zip(&g.b1) {
        *b -= lr * *d;
    }
    for (h, d) in model.heads.iter_mut().zip(&g.heads) {
        for (w, dw) in h.w.iter_mut().zip(&d.w) {
            *w -= lr * *dw;
        }
        for (b, db) in h.b.iter_mut().zip(&d.b) {
            *b -= lr * *db;
        }
    }
}

fn examples<T: Scalar>(model: &MtlModel<T>, data: &Dataset) -> Vec<Example<T>> {
    data.iter()
        .filter_map(|(c, w)| {
            let head = model.registry.get(c)?;
            Some((*head, model.norm.input(&w.fv), usize::from(w.level - 1)))
        })
        .collect()
}

fn mean_loss<T: Scalar>(model: &MtlModel<T>, ex: &[Example<T>]) -> f64 {
    if ex.is_empty() {
        return f64::NAN;
    }
    let total: f64 = ex.iter().map(|(h, x, y)| -model.trace(*h, x).p[*y].max(T::min_positive_value()).ln().as_f64()).sum();
    total / ex.len() as f64
}

fn check_levels(data: &Dataset) -> Result<()> {
    for (c, w) in data.iter() {
        if !(1..=5).contains(&w.level) {
            return Err(Error::invalid("level", format!("{} in trip {} of {c} not in 1..=5", w.level, w.trip_id)));
        }
        w.fv.validate()?;
    }
    Ok(())
}

/// Mini-batch gradient descent over all tasks jointly. Commuters in `train`
/// get a head if they lack one. The final parameters are kept; validation
/// loss is only reported.
pub fn train<T: Scalar>(model: &mut MtlModel<T>, train: &Dataset, val: &Dataset, cfg: &TrainConfig) -> Result<TrainReport> {
    cfg.validate()?;
    check_levels(train)?;
    check_levels(val)?;
    for (c, ws) in &train.tasks {
        if ws.is_empty() {
            log::warn!("commuter {c} has no training windows; excluded");
        } else {
            model.register(c);
        }
    }
    if train.is_empty() {
        return Err(Error::InsufficientData("no training windows".into()));
    }
    if !model.fitted {
        model.set_normalization(Normalization::fit(train.iter().map(|(_, w)| &w.fv)));
    }

    let ex = examples(model, train);
    let val_ex = examples(model, val);
    let lr = T::lit(cfg.learning_rate);
    let norm = T::from_usize_lossy(cfg.batch_size);
    let mut rng = seeded(cfg.seed);
    let mut order: Vec<usize> = (0..ex.len()).collect();
    let mut report = TrainReport::default();

    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut batch = Vec::with_capacity(cfg.batch_size);
        for chunk in order.chunks(cfg.batch_size) {
            batch.clear();
            batch.extend(chunk.iter().map(|&i| ex[i]));
            let (_, g) = loss_and_gradients(model, &batch, norm);
            apply(model, &g, lr);
        }
        report.train_loss.push(mean_loss(model, &ex));
        report.val_loss.push(mean_loss(model, &val_ex));
    }
    Ok(report)
}

/// Fresh multi-task model trained on every commuter in `train`.
pub fn mtl_train<T: Scalar>(train_set: &Dataset, val: &Dataset, cfg: &TrainConfig, hidden: usize) -> Result<(MtlModel<T>, TrainReport)> {
    let mut model = MtlModel::new(hidden, cfg.seed)?;
    let report = train(&mut model, train_set, val, cfg)?;
    Ok((model, report))
}

/// Same architecture with a single head, trained on one commuter alone.
pub fn stl_train<T: Scalar>(
    commuter: &str,
    train_set: &Dataset,
    val: &Dataset,
    cfg: &TrainConfig,
    hidden: usize,
) -> Result<(MtlModel<T>, TrainReport)> {
    mtl_train(&train_set.only(commuter), &val.only(commuter), cfg, hidden)
}
