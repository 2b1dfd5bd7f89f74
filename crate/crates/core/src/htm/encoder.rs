use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Linear scalar encoder: a block of `active_bits` contiguous ones whose
/// start position moves with the value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScalarEncoderConfig {
    pub min: f64,
    pub max: f64,
    pub buckets: usize,
    pub active_bits: usize,
    pub clip_out_of_range: bool,
}

impl Default for ScalarEncoderConfig {
    fn default() -> Self {
        ScalarEncoderConfig { min: 0.0, max: 1.0, buckets: 130, active_bits: 21, clip_out_of_range: true }
    }
}

impl ScalarEncoderConfig {
    pub fn with_range(min: f64, max: f64) -> Self {
        ScalarEncoderConfig { min, max, ..Default::default() }
    }

    pub fn width(&self) -> usize {
        self.buckets + self.active_bits - 1
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.max > self.min) {
            return Err(Error::param("encoder range", format!("[{}, {}] is empty", self.min, self.max)));
        }
        if self.active_bits == 0 || self.active_bits > self.buckets {
            return Err(Error::param(
                "encoder.active_bits",
                format!("{} must be in 1..={}", self.active_bits, self.buckets),
            ));
        }
        if self.active_bits.is_multiple_of(2) {
            return Err(Error::param("encoder.active_bits", "must be odd"));
        }
        Ok(())
    }

    pub fn bucket<T: Scalar>(&self, x: T) -> Result<usize> {
        let x = x.as_f64();
        if !x.is_finite() {
            return Err(Error::NonFinite(x));
        }
        if !self.clip_out_of_range && (x < self.min || x > self.max) {
            return Err(Error::param("encoder input", format!("{x} outside [{}, {}]", self.min, self.max)));
        }
        let frac = (x.clamp(self.min, self.max) - self.min) / (self.max - self.min);
        Ok((frac * (self.buckets - 1) as f64).round() as usize)
    }
}

/// Sorted indices of the active bits for `x`.
pub fn encode<T: Scalar>(x: T, cfg: &ScalarEncoderConfig) -> Result<Vec<usize>> {
    let start = cfg.bucket(x)?;
    Ok((start..start + cfg.active_bits).collect())
}
