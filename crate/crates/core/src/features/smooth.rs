use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trip::SensorSample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmootherKind {
    MovingAverage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SmootherConfig {
    pub kind: SmootherKind,
    /// Window width in samples; odd.
    pub width: usize,
}

impl Default for SmootherConfig {
    fn default() -> Self {
        SmootherConfig {
            kind: SmootherKind::MovingAverage,
            width: 5,
        }
    }
}

impl SmootherConfig {
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.width.is_multiple_of(2) {
            return Err(Error::param("smoother.width", format!("{} must be odd and >= 1", self.width)));
        }
        Ok(())
    }
}

/// Centered moving average of `accel_y`; windows are truncated at the edges.
pub fn smooth(stream: &[SensorSample], cfg: &SmootherConfig) -> Vec<SensorSample> {
    let half = cfg.width / 2;
    let n = stream.len();
    stream
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if half == 0 {
                return *s;
            }
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(n);
            let sum: f64 = stream[lo..hi].iter().map(|x| x.accel_y).sum();
            SensorSample {
                accel_y: sum / (hi - lo) as f64,
                ..*s
            }
        })
        .collect()
}
