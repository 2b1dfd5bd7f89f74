//! Streaming commuter-comfort inference.
//!
//! The pipeline turns a trip's sensor stream into per-window features
//! ([`features`]), scores each spatio-temporal feature with an HTM anomaly
//! detector ([`htm`]), and feeds the resulting discomfort likelihoods plus
//! the instantaneous trip features to a multi-task network with one head
//! per commuter ([`mtl`]). [`synth`] generates labelled trips from
//! self-exciting point processes so everything can be exercised without
//! field data.

pub mod baselines;
pub mod error;
pub mod evaluate;
pub mod features;
pub mod fsutil;
pub mod htm;
pub mod mtl;
pub mod pipeline;
pub mod rng;
pub mod scalar;
pub mod stream;
pub mod synth;
pub mod trip;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use stream::StreamingDetector;

/// Double-precision HTM detector.
pub type Detector = htm::HtmDetector<f64>;
pub type Detector32 = htm::HtmDetector<f32>;
/// Double-precision comfort model.
pub type Model = mtl::MtlModel<f64>;
pub type Model32 = mtl::MtlModel<f32>;
pub type Indicator = trip::IndicatorVector<f64>;
pub type Indicator32 = trip::IndicatorVector<f32>;
