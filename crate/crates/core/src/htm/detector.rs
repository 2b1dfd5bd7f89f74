use std::path::Path;

use serde::{Deserialize, Serialize};

use super::encoder::{encode, ScalarEncoderConfig};
use super::likelihood::{AnomalyLikelihood, LikelihoodConfig};
use super::spatial_pooler::{SpatialPooler, SpatialPoolerConfig};
use super::temporal_memory::{TemporalMemory, TemporalMemoryConfig};
use crate::error::{Error, Result};
use crate::fsutil::{atomic_write, read_to_string};
use crate::rng::{child, seeded};
use crate::scalar::Scalar;
use crate::stream::StreamingDetector;

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct HtmConfig {
    pub encoder: ScalarEncoderConfig,
    pub sp: SpatialPoolerConfig,
    pub tm: TemporalMemoryConfig,
    pub likelihood: LikelihoodConfig,
}

impl HtmConfig {
    pub fn with_range(min: f64, max: f64) -> Self {
        HtmConfig { encoder: ScalarEncoderConfig::with_range(min, max), ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        self.encoder.validate()?;
        self.sp.validate()?;
        self.tm.validate()?;
        self.likelihood.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorOutput<T> {
    pub raw: T,
    pub likelihood: T,
    /// Set on the first step, where no prediction exists yet.
    pub bootstrap: bool,
}

/// Encoder, spatial pooler, temporal memory and likelihood window for one
/// scalar stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct HtmDetector<T: Scalar> {
    cfg: HtmConfig,
    sp: SpatialPooler<T>,
    tm: TemporalMemory<T>,
    likelihood: AnomalyLikelihood<T>,
    learning: bool,
    steps: u64,
    ready: bool,
}

impl<T: Scalar> HtmDetector<T> {
    pub fn new(cfg: HtmConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let mut rng = seeded(seed);
        let sp = SpatialPooler::new(cfg.sp, cfg.encoder.width(), &mut rng)?;
        let tm = TemporalMemory::new(cfg.tm, cfg.sp.columns, child(&mut rng))?;
        Ok(HtmDetector {
            cfg,
            sp,
            tm,
            likelihood: AnomalyLikelihood::new(cfg.likelihood)?,
            learning: true,
            steps: 0,
            ready: true,
        })
    }

    pub fn config(&self) -> &HtmConfig {
        &self.cfg
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn is_ready(&self) -> bool {
        self.ready
    }

    pub fn learning(&self) -> bool {
        self.learning
    }

    pub fn set_learning(&mut self, on: bool) {
        self.learning = on;
    }

    pub fn step(&mut self, x: T) -> Result<DetectorOutput<T>> {
        let bits = encode(x, &self.cfg.encoder)?;
        let active = self.sp.compute(&bits, self.learning);
        let first = self.steps == 0;
        let raw = if first { T::one() } else { raw_score::<T>(&active, self.tm.predicted_columns()) };
        self.tm.compute(&active, self.learning);
        let likelihood = self.likelihood.update(raw);
        self.steps += 1;
        Ok(DetectorOutput { raw, likelihood, bootstrap: first })
    }

    /// Step through `prefix` with learning on. A prefix shorter than
    /// `required` leaves the detector not ready.
    pub fn bootstrap(&mut self, prefix: &[T], required: usize) -> Result<()> {
        self.learning = true;
        for &x in prefix {
            self.step(x)?;
        }
        self.ready = prefix.len() >= required;
        if !self.ready {
            return Err(Error::InsufficientData(format!(
                "bootstrap needs {required} windows, got {}",
                prefix.len()
            )));
        }
        Ok(())
    }

    pub fn to_checkpoint(&self) -> Result<String> {
        let ck = CheckpointRef { version: CHECKPOINT_VERSION, scalar: std::any::type_name::<T>(), detector: self };
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
        Ok(ck.detector)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        atomic_write(path, self.to_checkpoint()?.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_checkpoint(&read_to_string(path)?)
    }
}

impl<T: Scalar> StreamingDetector<T> for HtmDetector<T> {
    fn name(&self) -> &'static str {
        "htm"
    }

    fn score(&mut self, x: T) -> Result<T> {
        Ok(self.step(x)?.likelihood)
    }
}

/// Fraction of active columns that were not predicted.
pub fn raw_score<T: Scalar>(active: &[usize], predicted: &[usize]) -> T {
    if active.is_empty() {
        return T::zero();
    }
    let (mut i, mut j, mut hit) = (0, 0, 0usize);
    while i < active.len() && j < predicted.len() {
        match active[i].cmp(&predicted[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                hit += 1;
                i += 1;
                j += 1;
            }
        }
    }
    T::one() - T::from_usize_lossy(hit) / T::from_usize_lossy(active.len())
}

#[derive(Serialize)]
#[serde(bound = "")]
struct CheckpointRef<'a, T: Scalar> {
    version: u32,
    scalar: &'a str,
    detector: &'a HtmDetector<T>,
}

#[derive(Deserialize)]
#[serde(bound = "")]
struct Checkpoint<T: Scalar> {
    version: u32,
    scalar: String,
    detector: HtmDetector<T>,
}
