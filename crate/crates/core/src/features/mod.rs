//! Per-window features from a raw sample stream.

mod congestion;
mod jerk;
mod smooth;
mod zone;

use serde::{Deserialize, Serialize};

use crate::trip::{haversine_km, TripRecord};

pub use congestion::{classify_cycle, CongestionTracker, STOP_HOLD_S, STOP_SPEED_MS};
pub use jerk::jerk;
pub use smooth::{smooth, SmootherConfig};
pub use zone::time_zone;

/// The three spatio-temporal features scored by the anomaly detectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    Speed,
    Jerk,
    Congestion,
}

impl FeatureKind {
    pub const ALL: [FeatureKind; 3] = [FeatureKind::Speed, FeatureKind::Jerk, FeatureKind::Congestion];

    pub fn name(self) -> &'static str {
        match self {
            FeatureKind::Speed => "speed",
            FeatureKind::Jerk => "jerk",
            FeatureKind::Congestion => "congestion",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl std::fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for FeatureKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "speed" => Ok(FeatureKind::Speed),
            "jerk" | "jerkiness" => Ok(FeatureKind::Jerk),
            "congestion" => Ok(FeatureKind::Congestion),
            other => Err(crate::Error::param("feature", format!("unknown feature {other:?}"))),
        }
    }
}

/// Features for one `sample_window`-long slice of a trip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowObservation {
    pub window_index: usize,
    pub t_mid: f64,
    /// Mean speed, m/s.
    pub v: f64,
    /// Jerk, m/s³.
    pub j: f64,
    /// Congestion level 0..=2.
    pub c: u8,
    /// Travel time so far, s.
    pub travel_time: f64,
    /// Distance so far, km.
    pub distance: f64,
    pub zone: u8,
}

impl WindowObservation {
    pub fn value(&self, kind: FeatureKind) -> f64 {
        match kind {
            FeatureKind::Speed => self.v,
            FeatureKind::Jerk => self.j,
            FeatureKind::Congestion => f64::from(self.c),
        }
    }
}

/// Number of windows a trip of the given duration tiles into.
pub fn window_count(duration: f64, window: f64) -> usize {
    if duration <= 0.0 {
        1
    } else {
        (duration / window).ceil() as usize
    }
}

/// Splits a trip into windows and computes the instantaneous and
/// spatio-temporal features of each.
pub fn windows(trip: &TripRecord, smoother: &SmootherConfig) -> Vec<WindowObservation> {
    let samples = smooth(&trip.samples, smoother);
    if samples.is_empty() {
        return Vec::new();
    }
    let w = trip.meta.sample_window;
    let n = window_count(trip.duration(), w);

    // cumulative path length and per-sample speed (GPS, else displacement)
    let mut cum_km = Vec::with_capacity(samples.len());
    let mut speed = Vec::with_capacity(samples.len());
    let mut total = 0.0;
    for (i, s) in samples.iter().enumerate() {
        let step_km = if i == 0 {
            0.0
        } else {
            let p = &samples[i - 1];
            haversine_km(p.lat, p.lon, s.lat, s.lon)
        };
        total += step_km;
        cum_km.push(total);
        speed.push(s.speed.unwrap_or_else(|| {
            let (a, b) = if i == 0 {
                if samples.len() < 2 {
                    return 0.0;
                }
                (&samples[0], &samples[1])
            } else {
                (&samples[i - 1], s)
            };
            haversine_km(a.lat, a.lon, b.lat, b.lon) * 1000.0 / (b.t - a.t)
        }));
    }

    let mut tracker = CongestionTracker::new();
    let mut out = Vec::with_capacity(n);
    let mut start = 0;
    let (mut last_v, mut last_j) = (0.0, 0.0);
    for k in 0..n {
        let hi = (k + 1) as f64 * w;
        let end = if k + 1 == n {
            samples.len()
        } else {
            start + samples[start..].partition_point(|s| s.t < hi)
        };
        let slice = &samples[start..end];

        if !slice.is_empty() {
            last_v = speed[start..end].iter().sum::<f64>() / slice.len() as f64;
        }
        if let Ok(j) = jerk(slice) {
            last_j = j;
        }
        for (s, &v) in slice.iter().zip(&speed[start..end]) {
            tracker.push(s.t, v);
        }

        let t_mid = (k as f64 + 0.5) * w;
        out.push(WindowObservation {
            window_index: k,
            t_mid,
            v: last_v,
            j: last_j,
            c: tracker.level(),
            travel_time: t_mid,
            distance: distance_at(&samples, &cum_km, t_mid),
            zone: time_zone(trip.meta.start_clock, t_mid),
        });
        start = end;
    }
    out
}

fn distance_at(samples: &[crate::trip::SensorSample], cum_km: &[f64], t: f64) -> f64 {
    let idx = samples.partition_point(|s| s.t <= t);
    if idx == 0 {
        return 0.0;
    }
    if idx == samples.len() {
        return cum_km[idx - 1];
    }
    let (a, b) = (&samples[idx - 1], &samples[idx]);
    let frac = (t - a.t) / (b.t - a.t);
    cum_km[idx - 1] + frac * (cum_km[idx] - cum_km[idx - 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trip::{ClockTime, SensorSample, TripMeta};

    fn trip(samples: Vec<SensorSample>) -> TripRecord {
        TripRecord {
            meta: TripMeta::new("t", "c", ClockTime::new(7, 0).unwrap()),
            samples,
            labels: vec![],
            ground_truth_anomaly: None,
        }
    }

    #[test]
    fn sixty_second_trip_gives_twelve_windows() {
        let samples = (0..=60)
            .map(|i| SensorSample { t: i as f64, accel_y: 0.0, lat: 10.0, lon: 10.0, speed: Some(5.0) })
            .collect();
        assert_eq!(windows(&trip(samples), &SmootherConfig::default()).len(), 12);
    }

    #[test]
    fn empty_trip_gives_no_windows() {
        assert!(windows(&trip(vec![]), &SmootherConfig::default()).is_empty());
    }

    #[test]
    fn stationary_trip_is_all_zero() {
        let samples = (0..600)
            .map(|i| SensorSample { t: i as f64, accel_y: 0.0, lat: 10.0, lon: 10.0, speed: Some(0.0) })
            .collect();
        let obs = windows(&trip(samples), &SmootherConfig::default());
        for o in &obs {
            assert_eq!((o.v, o.j, o.c, o.distance), (0.0, 0.0, 0, 0.0));
        }
    }

    #[test]
    fn straight_line_distance_matches_speed_times_time() {
        // 0.001 degrees of latitude every 11.119 s is about 10 m/s
        let step_km = haversine_km(0.0, 0.0, 0.001, 0.0);
        let dt = step_km * 1000.0 / 10.0;
        let samples = (0..200)
            .map(|i| SensorSample {
                t: i as f64 * dt,
                accel_y: 0.0,
                lat: i as f64 * 0.001,
                lon: 0.0,
                speed: None,
            })
            .collect();
        let obs = windows(&trip(samples), &SmootherConfig::default());
        for o in obs.iter().skip(1) {
            let expected = 10.0 * o.travel_time / 1000.0;
            assert!((o.distance - expected).abs() <= 0.01 * expected, "{} vs {expected}", o.distance);
            assert!((o.v - 10.0).abs() < 1e-6, "v = {}", o.v);
        }
    }

    #[test]
    fn travel_time_and_distance_never_decrease() {
        let samples: Vec<_> = (0..500)
            .map(|i| {
                let t = i as f64 * 0.7;
                SensorSample {
                    t,
                    accel_y: (t * 0.3).sin(),
                    lat: 12.0 + 1e-5 * (t * 0.05).sin() * t,
                    lon: 77.0 + 1e-5 * t,
                    speed: Some((t * 0.01).cos().abs() * 8.0),
                }
            })
            .collect();
        let tr = trip(samples);
        let a = windows(&tr, &SmootherConfig::default());
        let b = windows(&tr, &SmootherConfig::default());
        assert_eq!(a, b);
        for pair in a.windows(2) {
            assert!(pair[1].travel_time >= pair[0].travel_time);
            assert!(pair[1].distance >= pair[0].distance);
        }
    }
}
