//! Batches of scripts for many commuters with different sensitivities.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_distr::{weighted::WeightedIndex, Distribution};
use serde::{Deserialize, Serialize};

use super::scenario::{AnomalyInterval, CommuterProfile, ScenarioScript};
use crate::features::FeatureKind;
use crate::rng::{seeded, stream};
use crate::trip::ClockTime;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PopulationConfig {
    pub commuters: usize,
    pub trips_per_commuter: usize,
    pub min_duration: f64,
    pub max_duration: f64,
    /// No anomaly is placed before this time (the detector bootstrap).
    pub quiet_prefix: f64,
    pub multipliers: Vec<f64>,
    pub min_anomaly_len: f64,
    pub max_anomaly_len: f64,
    /// Probability that a trip carries no anomaly at all.
    pub quiet_trip_prob: f64,
    /// Probability of a second anomaly interval on another feature.
    pub second_anomaly_prob: f64,
    /// Prefix for commuter ids, so batches can be merged.
    pub id_prefix: String,
    /// Relative chance that speed, jerk or congestion is a commuter's
    /// dominant sensitivity.
    pub dominant_weights: [f64; 3],
}

impl Default for PopulationConfig {
    fn default() -> Self {
        PopulationConfig {
            commuters: 10,
            trips_per_commuter: 5,
            min_duration: 1500.0,
            max_duration: 1800.0,
            quiet_prefix: 630.0,
            multipliers: vec![4.0, 8.0, 16.0],
            min_anomaly_len: 240.0,
            max_anomaly_len: 480.0,
            quiet_trip_prob: 0.15,
            second_anomaly_prob: 0.3,
            id_prefix: "c".into(),
            dominant_weights: [1.0, 1.0, 1.0],
        }
    }
}

/// Random commuter: one dominant sensitivity plus individual spread.
fn profile<R: Rng>(rng: &mut R, dominant_weights: &[f64; 3]) -> CommuterProfile {
    let mut w = [0.0f64; 3];
    let dominant = WeightedIndex::new(dominant_weights).map_or(0, |d| d.sample(rng));
    for (i, wi) in w.iter_mut().enumerate() {
        *wi = rng.random_range(0.0..0.35) + if i == dominant { 0.6 } else { 0.0 };
    }
    let sum: f64 = w.iter().sum();
    let w = w.map(|x| x / sum);
    let shift = rng.random_range(-0.05..0.1);
    let spread = rng.random_range(0.9..1.2);
    let base: [f64; 4] = [0.12, 0.3, 0.5, 0.7];
    CommuterProfile {
        w_speed: w[0],
        w_jerk: w[1],
        // keep the sum exactly 1 after rounding
        w_cong: 1.0 - w[0] - w[1],
        thresholds: base.map(|b| (b * spread + shift).max(0.02)),
    }
}

fn anomaly<R: Rng>(rng: &mut R, cfg: &PopulationConfig, duration: f64, feature: FeatureKind) -> Option<AnomalyInterval> {
    let len = rng.random_range(cfg.min_anomaly_len..=cfg.max_anomaly_len);
    let latest = duration - len - 30.0;
    if latest <= cfg.quiet_prefix {
        return None;
    }
    let t_start = rng.random_range(cfg.quiet_prefix..latest).round();
    let mult = *cfg.multipliers.choose(rng)?;
    Some(AnomalyInterval { t_start, t_end: t_start + len.round(), feature, intensity_multiplier: mult })
}

/// Scripts for `cfg.commuters × cfg.trips_per_commuter` trips, grouped by
/// commuter in order.
pub fn population(cfg: &PopulationConfig, seed: u64) -> Vec<ScenarioScript> {
    let mut out = Vec::with_capacity(cfg.commuters * cfg.trips_per_commuter);
    for c in 0..cfg.commuters {
        let mut crng = stream(seed, c as u64);
        let prof = profile(&mut crng, &cfg.dominant_weights);
        let home_clock = crng.random_range(6..22u8);
        for k in 0..cfg.trips_per_commuter {
            let mut rng = seeded(crng.random());
            let duration = rng.random_range(cfg.min_duration..=cfg.max_duration).round();
            let hour = (home_clock + rng.random_range(0..3)) % 24;
            let mut script = ScenarioScript {
                trip_id: format!("{}{c:03}-t{k:02}", cfg.id_prefix),
                commuter_id: format!("{}{c:03}", cfg.id_prefix),
                start_clock: ClockTime::new(hour, rng.random_range(0..60)).expect("valid clock"),
                trip_duration: duration,
                cruise_speed: rng.random_range(9.0..15.0),
                profile: prof.clone(),
                ..Default::default()
            };
            if !rng.random_bool(cfg.quiet_trip_prob) {
                let mut feats = FeatureKind::ALL.to_vec();
                feats.shuffle(&mut rng);
                let count = if rng.random_bool(cfg.second_anomaly_prob) { 2 } else { 1 };
                for &f in &feats[..count] {
                    if let Some(a) = anomaly(&mut rng, cfg, duration, f) {
                        script.anomaly_intervals.push(a);
                    }
                }
            }
            out.push(script);
        }
    }
    out
}
