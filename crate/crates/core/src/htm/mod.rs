//! Per-feature HTM anomaly detection.

pub mod detector;
pub mod encoder;
pub mod likelihood;
pub mod spatial_pooler;
pub mod temporal_memory;

pub use detector::{raw_score, DetectorOutput, HtmConfig, HtmDetector, CHECKPOINT_VERSION};
pub use encoder::{encode, ScalarEncoderConfig};
pub use likelihood::{is_anomalous, likelihood_from_z, q_function, AnomalyLikelihood, LikelihoodConfig, DEFAULT_EPSILON};
pub use spatial_pooler::{SpatialPooler, SpatialPoolerConfig};
pub use temporal_memory::{TemporalMemory, TemporalMemoryConfig};
