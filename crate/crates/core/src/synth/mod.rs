//! Synthetic trips with known ground truth.

mod hawkes;
mod population;
mod render;
mod scenario;

pub use hawkes::{
    simulate_hawkes, simulate_hawkes_boosted, simulate_st_hawkes, simulate_st_hawkes_boosted, RateBoost, Region,
    SpatioTemporalHawkesParams, StEvent, TemporalHawkesParams,
};
pub use population::{population, PopulationConfig};
pub use render::{ground_truth, label_oracle, render_trip, window_levels, VICINITY};
pub use scenario::{AnomalyInterval, CommuterProfile, ScenarioScript};
