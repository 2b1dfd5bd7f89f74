use crate::error::Result;
use crate::scalar::Scalar;

/// A single-owner streaming scorer: one value in, one anomaly score out.
/// Higher scores mean more anomalous.
pub trait StreamingDetector<T: Scalar>: Send {
    fn name(&self) -> &'static str;

    fn score(&mut self, x: T) -> Result<T>;
}
