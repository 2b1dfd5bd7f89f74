use std::collections::BTreeMap;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsutil::{atomic_write, read_to_string};
use crate::rng::{seeded, SeededRng};
use crate::scalar::Scalar;
use crate::trip::{FeatureVector, IndicatorVector};

/// Likelihoods (3), scaled travel time and distance (2), one-hot zone (4).
pub const INPUT_DIM: usize = 9;
pub const LEVELS: usize = 5;
pub const DEFAULT_HIDDEN: usize = 32;
pub const CHECKPOINT_VERSION: u32 = 1;

/// Per-dataset maxima used to scale travel time and distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub max_travel_time: f64,
    pub max_distance: f64,
}

impl Default for Normalization {
    fn default() -> Self {
        Normalization { max_travel_time: 1.0, max_distance: 1.0 }
    }
}

impl Normalization {
    pub fn fit<'a>(fvs: impl IntoIterator<Item = &'a FeatureVector>) -> Self {
        let (mut t, mut d) = (0.0f64, 0.0f64);
        for fv in fvs {
            t = t.max(fv.travel_time);
            d = d.max(fv.distance);
        }
        Normalization {
            max_travel_time: if t > 0.0 { t } else { 1.0 },
            max_distance: if d > 0.0 { d } else { 1.0 },
        }
    }

    pub fn input<T: Scalar>(&self, fv: &FeatureVector) -> [T; INPUT_DIM] {
        let mut x = [T::zero(); INPUT_DIM];
        x[0] = T::lit(fv.l_speed);
        x[1] = T::lit(fv.l_jerk);
        x[2] = T::lit(fv.l_cong);
        x[3] = T::lit(fv.travel_time / self.max_travel_time);
        x[4] = T::lit(fv.distance / self.max_distance);
        x[5 + usize::from(fv.zone.min(3))] = T::one();
        x
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Head<T: Scalar> {
    /// `LEVELS × hidden`, row-major.
    pub w: Vec<T>,
    pub b: [T; LEVELS],
}

impl<T: Scalar> Head<T> {
    fn zeros(hidden: usize) -> Self {
        Head { w: vec![T::zero(); LEVELS * hidden], b: [T::zero(); LEVELS] }
    }

    fn random(hidden: usize, rng: &mut SeededRng) -> Self {
        let r = 1.0 / (hidden as f64).sqrt();
        Head { w: (0..LEVELS * hidden).map(|_| T::lit(rng.random_range(-r..r))).collect(), b: [T::zero(); LEVELS] }
    }
}

/// One shared rectified layer feeding a softmax head per commuter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct MtlModel<T: Scalar> {
    pub(crate) hidden: usize,
    /// `hidden × INPUT_DIM`, row-major.
    pub(crate) w1: Vec<T>,
    pub(crate) b1: Vec<T>,
    pub(crate) heads: Vec<Head<T>>,
    pub(crate) registry: BTreeMap<String, usize>,
    pub(crate) norm: Normalization,
    pub(crate) fitted: bool,
    pub(crate) rng: SeededRng,
}

/// Intermediate values of one forward pass, kept for backpropagation.
pub(crate) struct Trace<T> {
    pub pre: Vec<T>,
    pub h: Vec<T>,
    pub p: [T; LEVELS],
}

impl<T: Scalar> MtlModel<T> {
    pub fn new(hidden: usize, seed: u64) -> Result<Self> {
        if hidden == 0 {
            return Err(Error::param("hidden", "must be >= 1"));
        }
        let mut rng = seeded(seed);
        let r = (6.0 / INPUT_DIM as f64).sqrt();
        let w1 = (0..hidden * INPUT_DIM).map(|_| T::lit(rng.random_range(-r..r))).collect();
        Ok(MtlModel {
            hidden,
            w1,
            b1: vec![T::zero(); hidden],
            heads: Vec::new(),
            registry: BTreeMap::new(),
            norm: Normalization::default(),
            fitted: false,
            rng,
        })
    }

    /// Model with every weight zero; its outputs are uniform.
    pub fn zeros(hidden: usize) -> Self {
        MtlModel {
            hidden,
            w1: vec![T::zero(); hidden * INPUT_DIM],
            b1: vec![T::zero(); hidden],
            heads: Vec::new(),
            registry: BTreeMap::new(),
            norm: Normalization::default(),
            fitted: false,
            rng: seeded(0),
        }
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn normalization(&self) -> Normalization {
        self.norm
    }

    pub fn set_normalization(&mut self, norm: Normalization) {
        self.norm = norm;
        self.fitted = true;
    }

    pub fn commuters(&self) -> impl Iterator<Item = &str> {
        self.registry.keys().map(String::as_str)
    }

    pub fn head_count(&self) -> usize {
        self.heads.len()
    }

    pub fn is_registered(&self, commuter: &str) -> bool {
        self.registry.contains_key(commuter)
    }

    pub fn head_index(&self, commuter: &str) -> Result<usize> {
        self.registry.get(commuter).copied().ok_or_else(|| Error::UnregisteredCommuter(commuter.to_string()))
    }

    /// Registers `commuter` with a freshly initialized head if it is new.
    pub fn register(&mut self, commuter: &str) -> usize {
        if let Some(&i) = self.registry.get(commuter) {
            return i;
        }
        let head = if self.w1.iter().all(|w| *w == T::zero()) {
            Head::zeros(self.hidden)
        } else {
            Head::random(self.hidden, &mut self.rng)
        };
        self.heads.push(head);
        let i = self.heads.len() - 1;
        self.registry.insert(commuter.to_string(), i);
        i
    }

    pub(crate) fn trace(&self, head: usize, x: &[T; INPUT_DIM]) -> Trace<T> {
        let hd = self.hidden;
        let mut pre = self.b1.clone();
        for (j, p) in pre.iter_mut().enumerate() {
            let row = &self.w1[j * INPUT_DIM..(j + 1) * INPUT_DIM];
            for (w, xi) in row.iter().zip(x) {
                *p += *w * *xi;
            }
        }
        let h: Vec<T> = pre.iter().map(|&v| v.max(T::zero())).collect();
        let head = &self.heads[head];
        let mut z = head.b;
        for (k, zk) in z.iter_mut().enumerate() {
            for (w, hj) in head.w[k * hd..(k + 1) * hd].iter().zip(&h) {
                *zk += *w * *hj;
            }
        }
        Trace { pre, h, p: softmax(z) }
    }

    /// Every parameter in a flat order: shared weights, shared bias, then
    /// each head's weights and bias.
    pub fn parameters(&self) -> Vec<T> {
        let mut v = self.w1.clone();
        v.extend(&self.b1);
        for h in &self.heads {
            v.extend(&h.w);
            v.extend(&h.b);
        }
        v
    }

    /// Parameter `i` in the order of [`parameters`](Self::parameters).
    pub fn parameter_mut(&mut self, mut i: usize) -> Option<&mut T> {
        if i < self.w1.len() {
            return Some(&mut self.w1[i]);
        }
        i -= self.w1.len();
        if i < self.b1.len() {
            return Some(&mut self.b1[i]);
        }
        i -= self.b1.len();
        for h in &mut self.heads {
            if i < h.w.len() {
                return Some(&mut h.w[i]);
            }
            i -= h.w.len();
            if i < LEVELS {
                return Some(&mut h.b[i]);
            }
            i -= LEVELS;
        }
        None
    }

    pub fn forward_input(&self, head: usize, x: &[T; INPUT_DIM]) -> IndicatorVector<T> {
        IndicatorVector { p: self.trace(head, x).p }
    }

    pub fn forward(&self, commuter: &str, fv: &FeatureVector) -> Result<IndicatorVector<T>> {
        let head = self.head_index(commuter)?;
        Ok(self.forward_input(head, &self.norm.input(fv)))
    }

    /// Mean of every head's output; the fallback for commuters that have no
    /// head yet.
    pub fn forward_average(&self, fv: &FeatureVector) -> Result<IndicatorVector<T>> {
        if self.heads.is_empty() {
            return Err(Error::UnregisteredCommuter("<no heads>".into()));
        }
        let x = self.norm.input(fv);
        let mut p = [T::zero(); LEVELS];
        for h in 0..self.heads.len() {
            for (acc, v) in p.iter_mut().zip(self.trace(h, &x).p) {
                *acc += v;
            }
        }
        let n = T::from_usize_lossy(self.heads.len());
        Ok(IndicatorVector { p: p.map(|v| v / n) })
    }

    /// Own head when registered, otherwise the head average.
    pub fn forward_or_average(&self, commuter: &str, fv: &FeatureVector) -> Result<IndicatorVector<T>> {
        match self.registry.get(commuter) {
            Some(&h) => Ok(self.forward_input(h, &self.norm.input(fv))),
            None => self.forward_average(fv),
        }
    }

    pub fn to_checkpoint(&self) -> Result<String> {
        let ck = CheckpointRef { version: CHECKPOINT_VERSION, scalar: std::any::type_name::<T>(), model: self };
        serde_json::to_string(&ck).map_err(|e| Error::Checkpoint(e.to_string()))
    }

    pub fn from_checkpoint(text: &str) -> Result<Self> {
        let ck: Checkpoint<T> = serde_json::from_str(text).map_err(|e| Error::Checkpoint(e.to_string()))?;
        if ck.version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!("unsupported version {}", ck.version)));
        }
        if ck.scalar != std::any::type_name::<T>() {
            return Err(Error::Checkpoint(format!("scalar type {} does not match", ck.scalar)));
        }
        let m = ck.model;
        if m.w1.len() != m.hidden * INPUT_DIM
            || m.b1.len() != m.hidden
            || m.heads.iter().any(|h| h.w.len() != LEVELS * m.hidden)
            || m.registry.values().any(|&i| i >= m.heads.len())
        {
            return Err(Error::Checkpoint("inconsistent dimensions".into()));
        }
        Ok(m)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        atomic_write(path, self.to_checkpoint()?.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_checkpoint(&read_to_string(path)?)
    }
}

pub fn softmax<T: Scalar>(z: [T; LEVELS]) -> [T; LEVELS] {
    let m = z.iter().copied().fold(T::neg_infinity(), T::max);
    let e = z.map(|v| (v - m).exp());
    let s: T = e.iter().copied().sum();
    e.map(|v| v / s)
}

#[derive(Serialize)]
#[serde(bound = "")]
struct CheckpointRef<'a, T: Scalar> {
    version: u32,
    scalar: &'a str,
    model: &'a MtlModel<T>,
}

#[derive(Deserialize)]
#[serde(bound = "")]
struct Checkpoint<T: Scalar> {
    version: u32,
    scalar: String,
    model: MtlModel<T>,
}
