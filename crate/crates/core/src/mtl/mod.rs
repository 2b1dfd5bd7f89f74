//! Multi-task comfort-level predictor: a shared rectified layer with one
//! softmax head per commuter.

pub mod feedback;
pub mod model;
pub mod train;

pub use feedback::{retrain, should_query, FeedbackQueue, Query, DEFAULT_GAP, QUERY_SPAN_S};
pub use model::{softmax, MtlModel, Normalization, DEFAULT_HIDDEN, INPUT_DIM, LEVELS};
pub use train::{loss_and_gradients, mtl_train, stl_train, train, Dataset, Example, Gradients, LabeledWindow, TrainConfig, TrainReport};
