//! Renders a scenario into a sensor stream.
//!
//! Speed-change events (temporal Hawkes) move the target speed around the
//! cruise speed; jerk events (spatio-temporal Hawkes) add short
//! acceleration pulses; congestion events insert full stops. Anomaly
//! intervals multiply the background rate of one process.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::hawkes::{simulate_hawkes_boosted, simulate_st_hawkes_boosted, RateBoost, Region};
use super::scenario::ScenarioScript;
use crate::error::Result;
use crate::features::{window_count, windows, FeatureKind, SmootherConfig, WindowObservation};
use crate::rng::{child, SeededRng};
use crate::trip::{ComfortLabel, SensorSample, TripMeta, TripRecord};

/// Spatial events are drawn in a 1 km × 100 m box around the vehicle.
pub const VICINITY: Region = Region { x_min: 0.0, x_max: 1.0, y_min: -0.05, y_max: 0.05 };

const MIN_SPEED: f64 = 4.0;
const MAX_SPEED: f64 = 22.0;
const SPEED_STEP_SD: f64 = 3.0;
const SPEED_REVERSION: f64 = 0.25;
const FOLLOW_TAU_S: f64 = 6.0;
const BRAKE_TAU_S: f64 = 2.0;
const MAX_ACCEL: f64 = 2.5;
const MAX_BRAKE: f64 = 3.5;
const STOP_HOLD_MIN_S: f64 = 20.0;
const STOP_HOLD_MAX_S: f64 = 50.0;
/// Queued stops wait until the vehicle has been moving this long.
const MIN_MOVE_S: f64 = 20.0;
const JERK_PULSE_S: f64 = 3.0;
const ACCEL_NOISE_SD: f64 = 0.05;
const SPEED_NOISE_SD: f64 = 0.1;
const M_PER_DEG_LAT: f64 = 6_371_000.0 * PI / 180.0;

#[derive(Debug, Clone, Copy)]
enum Drive {
    Cruising,
    Braking,
    Holding { until: f64 },
}

fn boost(script: &ScenarioScript, kind: FeatureKind) -> RateBoost {
    script
        .anomaly_intervals
        .iter()
        .filter(|a| a.feature == kind)
        .fold(RateBoost::none(), |b, a| b.with_span(a.t_start, a.t_end, a.intensity_multiplier))
}

/// Per-window anomaly truth: a window is flagged when it overlaps any
/// anomaly interval.
pub fn ground_truth(script: &ScenarioScript, n_windows: usize) -> Vec<bool> {
    (0..n_windows)
        .map(|k| {
            let (a, b) = (k as f64 * script.window, (k + 1) as f64 * script.window);
            script.anomaly_intervals.iter().any(|iv| iv.overlaps(a, b))
        })
        .collect()
}

pub fn render_trip(script: &ScenarioScript, rng: &mut SeededRng) -> Result<TripRecord> {
    script.validate()?;
    let horizon = script.trip_duration;
    let dt = script.sample_period;

    // one child stream per source of randomness, drawn in a fixed order
    let mut speed_rng = child(rng);
    let mut jerk_rng = child(rng);
    let mut cong_rng = child(rng);
    let mut noise_rng = child(rng);
    let mut route_rng = child(rng);

    let speed_events =
        simulate_hawkes_boosted(&script.speed_process, horizon, &boost(script, FeatureKind::Speed), &mut speed_rng)?;
    let jerk_events = simulate_st_hawkes_boosted(
        &script.jerk_process,
        horizon,
        &VICINITY,
        &boost(script, FeatureKind::Jerk),
        &mut jerk_rng,
    )?;
    let stop_events = simulate_st_hawkes_boosted(
        &script.congestion_process,
        horizon,
        &VICINITY,
        &boost(script, FeatureKind::Congestion),
        &mut cong_rng,
    )?;

    let step = Normal::new(0.0, SPEED_STEP_SD).expect("sd > 0");
    let speed_jumps: Vec<(f64, f64)> = speed_events.iter().map(|&t| (t, step.sample(&mut speed_rng))).collect();
    let pulses: Vec<(f64, f64)> = jerk_events
        .iter()
        .map(|e| {
            let amp = jerk_rng.random_range(2.0..4.0);
            (e.t, if jerk_rng.random::<bool>() { amp } else { -amp })
        })
        .collect();
    let stops: Vec<(f64, f64)> = stop_events
        .iter()
        .map(|e| (e.t, cong_rng.random_range(STOP_HOLD_MIN_S..STOP_HOLD_MAX_S)))
        .collect();

    let accel_noise = Normal::new(0.0, ACCEL_NOISE_SD).expect("sd > 0");
    let speed_noise = Normal::new(0.0, SPEED_NOISE_SD).expect("sd > 0");

    let mut lat = route_rng.random_range(12.85..13.05);
    let mut lon = route_rng.random_range(77.50..77.70);
    let mut heading: f64 = route_rng.random_range(0.0..2.0 * PI);
    let mut to_turn = route_rng.random_range(300.0..1500.0);

    let n_steps = (horizon / dt).round() as usize;
    let mut samples = Vec::with_capacity(n_steps + 1);
    let (mut v, mut target) = (0.0f64, script.cruise_speed);
    let mut drive = Drive::Cruising;
    let (mut next_jump, mut next_stop, mut hold_len) = (0usize, 0usize, 0.0);
    let mut resumed_at = f64::NEG_INFINITY;

    for i in 0..=n_steps {
        let t = i as f64 * dt;
        while next_jump < speed_jumps.len() && speed_jumps[next_jump].0 <= t {
            let jump = speed_jumps[next_jump].1;
            target = (target + jump - SPEED_REVERSION * (target - script.cruise_speed)).clamp(MIN_SPEED, MAX_SPEED);
            next_jump += 1;
        }
        // a stop arriving mid-stop waits until the vehicle has moved again
        if next_stop < stops.len()
            && stops[next_stop].0 <= t
            && matches!(drive, Drive::Cruising)
            && t - resumed_at >= MIN_MOVE_S
        {
            drive = Drive::Braking;
            hold_len = stops[next_stop].1;
            next_stop += 1;
        }

        let v_prev = v;
        if i > 0 {
            let (desired, tau, up, down) = match drive {
                Drive::Cruising => (target, FOLLOW_TAU_S, MAX_ACCEL, MAX_BRAKE),
                Drive::Braking | Drive::Holding { .. } => (0.0, BRAKE_TAU_S, MAX_ACCEL, MAX_BRAKE),
            };
            let dv = ((desired - v) * (1.0 - (-dt / tau).exp())).clamp(-down * dt, up * dt);
            v = (v + dv).max(0.0);
            match drive {
                Drive::Braking if v < 0.3 => {
                    v = 0.0;
                    drive = Drive::Holding { until: t + hold_len };
                }
                Drive::Holding { until } => {
                    v = 0.0;
                    if t >= until {
                        drive = Drive::Cruising;
                        resumed_at = t;
                    }
                }
                _ => {}
            }
        }

        let pulse: f64 = pulses
            .iter()
            .filter(|&&(te, _)| t >= te && t < te + JERK_PULSE_S)
            .map(|&(te, amp)| amp * (PI * (t - te) / JERK_PULSE_S).sin())
            .sum();
        let accel_y = (v - v_prev) / dt + pulse + accel_noise.sample(&mut noise_rng);
        let reading = (v + speed_noise.sample(&mut noise_rng)).max(0.0);

        if i > 0 {
            let dist = 0.5 * (v + v_prev) * dt;
            to_turn -= dist;
            if to_turn <= 0.0 {
                heading += route_rng.random_range(-0.6..0.6);
                to_turn = route_rng.random_range(300.0..1500.0);
            }
            lat += dist * heading.cos() / M_PER_DEG_LAT;
            lon += dist * heading.sin() / (M_PER_DEG_LAT * lat.to_radians().cos());
        }
        samples.push(SensorSample { t, accel_y, lat, lon, speed: Some(reading) });
    }

    let meta = TripMeta {
        trip_id: script.trip_id.clone(),
        commuter_id: script.commuter_id.clone(),
        start_clock: script.start_clock,
        sample_window: script.window,
    };
    let n_windows = window_count(horizon, script.window);
    let truth = ground_truth(script, n_windows);
    let mut record = TripRecord {
        meta,
        samples,
        labels: Vec::new(),
        ground_truth_anomaly: Some(truth.clone()),
    };
    let obs = windows(&record, &SmootherConfig::default());
    record.labels = label_oracle(script, &obs, &truth);
    Ok(record)
}

/// Simulated commuter. Each window's latent discomfort is
/// `Σ_f w_f · z_f` where `z_f = 1 − 1/m_f` measures how far feature `f`'s
/// generating process is pushed from its comfort rate (`m_f` = active
/// intensity multiplier). Levels come from the profile thresholds and a
/// label is emitted only when the level changes.
pub fn label_oracle(script: &ScenarioScript, windows: &[WindowObservation], truth: &[bool]) -> Vec<ComfortLabel> {
    let w = script.window;
    let mut labels: Vec<ComfortLabel> = Vec::new();
    for obs in windows {
        let k = obs.window_index;
        let (a, b) = (k as f64 * w, (k + 1) as f64 * w);
        let flagged = truth.get(k).copied().unwrap_or(false);
        let score: f64 = if flagged {
            FeatureKind::ALL
                .iter()
                .map(|&f| {
                    let m = script.multiplier(f, a, b);
                    script.profile.weight(f) * (1.0 - 1.0 / m).max(0.0)
                })
                .sum()
        } else {
            0.0
        };
        let level = script.profile.level_for(score);
        if labels.last().is_none_or(|l| l.level != level) {
            labels.push(ComfortLabel { t: a.min(script.trip_duration), level });
        }
    }
    labels
}

/// Per-window comfort levels of a labelled trip (forward-filled labels).
pub fn window_levels(trip: &TripRecord, n_windows: usize) -> Vec<u8> {
    (0..n_windows)
        .map(|k| trip.level_at(k as f64 * trip.meta.sample_window))
        .collect()
}
