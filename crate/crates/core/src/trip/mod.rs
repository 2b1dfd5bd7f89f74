//! Trip records: timestamped sensor samples plus sparse comfort labels.

mod geo;
mod io;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use geo::{haversine_km, EARTH_RADIUS_KM};
pub use io::{parse_trip, parse_trip_str, render_trip, write_trip};

/// One reading from the phone, already rotated into the vehicle frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorSample {
    /// Seconds since trip start.
    pub t: f64,
    /// Longitudinal acceleration, m/s².
    pub accel_y: f64,
    pub lat: f64,
    pub lon: f64,
    /// GPS-reported speed in m/s, when the phone provided one.
    pub speed: Option<f64>,
}

/// Local wall-clock time, no timezone attached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClockTime {
    hour: u8,
    minute: u8,
}

impl ClockTime {
    pub fn new(hour: u8, minute: u8) -> Result<Self> {
        if hour > 23 || minute > 59 {
            return Err(Error::invalid(
                "start_clock",
                format!("{hour:02}:{minute:02} is not a valid clock time"),
            ));
        }
        Ok(ClockTime { hour, minute })
    }

    pub fn hour(self) -> u8 {
        self.hour
    }

    pub fn minute(self) -> u8 {
        self.minute
    }

    pub fn seconds_since_midnight(self) -> u32 {
        u32::from(self.hour) * 3600 + u32::from(self.minute) * 60
    }
}

impl fmt::Display for ClockTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02}:{:02}", self.hour, self.minute)
    }
}

impl FromStr for ClockTime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid("start_clock", format!("expected HH:MM, got {s:?}"));
        let (h, m) = s.split_once(':').ok_or_else(bad)?;
        if h.len() != 2 || m.len() != 2 {
            return Err(bad());
        }
        let hour = h.parse().map_err(|_| bad())?;
        let minute = m.parse().map_err(|_| bad())?;
        ClockTime::new(hour, minute)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripMeta {
    pub trip_id: String,
    pub commuter_id: String,
    pub start_clock: ClockTime,
    /// Feature window length in seconds.
    pub sample_window: f64,
}

impl TripMeta {
    pub const DEFAULT_WINDOW_S: f64 = 5.0;

    pub fn new(trip_id: impl Into<String>, commuter_id: impl Into<String>, start_clock: ClockTime) -> Self {
        TripMeta {
            trip_id: trip_id.into(),
            commuter_id: commuter_id.into(),
            start_clock,
            sample_window: Self::DEFAULT_WINDOW_S,
        }
    }
}

/// A comfort level reported by the commuter, 1 (most comfortable) to 5.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComfortLabel {
    pub t: f64,
    pub level: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripRecord {
    pub meta: TripMeta,
    pub samples: Vec<SensorSample>,
    pub labels: Vec<ComfortLabel>,
    /// Per-window anomaly truth, present only on synthetic trips.
    pub ground_truth_anomaly: Option<Vec<bool>>,
}

fn check_id(field: &'static str, id: &str) -> Result<()> {
    if id.is_empty() {
        return Err(Error::invalid(field, "must not be empty"));
    }
    if id.chars().any(|c| c.is_whitespace() || c == '=') {
        return Err(Error::invalid(field, format!("{id:?} contains whitespace or '='")));
    }
    Ok(())
}

impl TripRecord {
    pub fn validate(&self) -> Result<()> {
        check_id("trip_id", &self.meta.trip_id)?;
        check_id("commuter_id", &self.meta.commuter_id)?;
        let w = self.meta.sample_window;
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::invalid("sample_window", format!("{w} must be positive")));
        }

        let mut prev_t: Option<f64> = None;
        for (i, s) in self.samples.iter().enumerate() {
            if !(s.t.is_finite() && s.t >= 0.0) {
                return Err(Error::invalid("t", format!("sample {i}: {} is not a non-negative time", s.t)));
            }
            if let Some(p) = prev_t {
                if s.t <= p {
                    return Err(Error::invalid("t", format!("t not increasing at sample {i} ({} after {p})", s.t)));
                }
            }
            prev_t = Some(s.t);
            if !s.accel_y.is_finite() {
                return Err(Error::invalid("accel_y", format!("sample {i}: not finite")));
            }
            if !(s.lat.is_finite() && s.lat.abs() <= 90.0) {
                return Err(Error::invalid("lat", format!("sample {i}: {} out of [-90, 90]", s.lat)));
            }
            if !(s.lon.is_finite() && s.lon.abs() <= 180.0) {
                return Err(Error::invalid("lon", format!("sample {i}: {} out of [-180, 180]", s.lon)));
            }
            if let Some(v) = s.speed {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::invalid("speed", format!("sample {i}: {v} is negative or not finite")));
                }
            }
        }

        let last_t = self.samples.last().map_or(0.0, |s| s.t);
        let mut prev_label: Option<f64> = None;
        for (i, l) in self.labels.iter().enumerate() {
            if !(1..=5).contains(&l.level) {
                return Err(Error::invalid("level", format!("label {i}: {} not in 1..5", l.level)));
            }
            if !(l.t.is_finite() && l.t >= 0.0 && l.t <= last_t) {
                return Err(Error::invalid("label t", format!("label {i}: {} outside [0, {last_t}]", l.t)));
            }
            if prev_label.is_some_and(|p| l.t < p) {
                return Err(Error::invalid("label t", format!("labels not sorted at label {i}")));
            }
            prev_label = Some(l.t);
        }
        Ok(())
    }

    pub fn duration(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }

    /// Comfort level in force at time `t`: the latest label at or before it,
    /// or the slider default of 1.
    pub fn level_at(&self, t: f64) -> u8 {
        let idx = self.labels.partition_point(|l| l.t <= t);
        if idx == 0 {
            1
        } else {
            self.labels[idx - 1].level
        }
    }
}

/// Model input for one window: three discomfort likelihoods and three
/// instantaneous trip features.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub l_speed: f64,
    pub l_jerk: f64,
    pub l_cong: f64,
    /// Seconds since trip start.
    pub travel_time: f64,
    /// Kilometres travelled.
    pub distance: f64,
    /// Time-of-day zone, 0..=3.
    pub zone: u8,
}

impl FeatureVector {
    pub fn likelihoods(&self) -> [f64; 3] {
        [self.l_speed, self.l_jerk, self.l_cong]
    }

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [("l_speed", self.l_speed), ("l_jerk", self.l_jerk), ("l_cong", self.l_cong)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(field, format!("{v} not in [0, 1]")));
            }
        }
        if !(self.travel_time.is_finite() && self.travel_time >= 0.0) {
            return Err(Error::invalid("travel_time", "must be non-negative"));
        }
        if !(self.distance.is_finite() && self.distance >= 0.0) {
            return Err(Error::invalid("distance", "must be non-negative"));
        }
        if self.zone > 3 {
            return Err(Error::invalid("zone", format!("{} not in 0..=3", self.zone)));
        }
        Ok(())
    }
}

/// Probabilities over comfort levels 1..=5 (index 0 is level 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct IndicatorVector<T: Scalar = f64> {
    pub p: [T; 5],
}

impl<T: Scalar> IndicatorVector<T> {
    pub fn uniform() -> Self {
        IndicatorVector { p: [T::lit(0.2); 5] }
    }

    /// Most probable level; ties go to the lower level.
    pub fn level(&self) -> u8 {
        let mut best = 0;
        for i in 1..5 {
            if self.p[i] > self.p[best] {
                best = i;
            }
        }
        best as u8 + 1
    }

    pub fn prob(&self, level: u8) -> T {
        self.p[usize::from(level - 1)]
    }

    /// Difference between the highest and second-highest probability.
    pub fn top_gap(&self) -> T {
        let mut first = T::neg_infinity();
        let mut second = T::neg_infinity();
        for &v in &self.p {
            if v > first {
                second = first;
                first = v;
            } else if v > second {
                second = v;
            }
        }
        first - second
    }
}
