//! Scenario scripts: everything needed to render one synthetic trip.
//!
//! Text form is one `key = value` per line; `#` starts a comment and
//! `anomaly = <t_start> <t_end> <feature> <multiplier>` may repeat.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::hawkes::{SpatioTemporalHawkesParams, TemporalHawkesParams};
use crate::error::{Error, Result};
use crate::features::FeatureKind;
use crate::fsutil;
use crate::trip::ClockTime;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnomalyInterval {
    pub t_start: f64,
    pub t_end: f64,
    pub feature: FeatureKind,
    /// Factor applied to the feature process's background rate.
    pub intensity_multiplier: f64,
}

impl AnomalyInterval {
    /// True when the half-open window `[a, b)` overlaps `[t_start, t_end)`.
    pub fn overlaps(&self, a: f64, b: f64) -> bool {
        a < self.t_end && b > self.t_start
    }
}

/// How one simulated commuter turns process deviations into comfort levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommuterProfile {
    pub w_speed: f64,
    pub w_jerk: f64,
    pub w_cong: f64,
    /// Score cut points for levels 2..=5, strictly increasing.
    pub thresholds: [f64; 4],
}

impl Default for CommuterProfile {
    fn default() -> Self {
        CommuterProfile {
            w_speed: 1.0 / 3.0,
            w_jerk: 1.0 / 3.0,
            w_cong: 1.0 / 3.0,
            thresholds: [0.15, 0.35, 0.55, 0.75],
        }
    }
}

impl CommuterProfile {
    pub fn weight(&self, kind: FeatureKind) -> f64 {
        match kind {
            FeatureKind::Speed => self.w_speed,
            FeatureKind::Jerk => self.w_jerk,
            FeatureKind::Congestion => self.w_cong,
        }
    }

    pub fn level_for(&self, score: f64) -> u8 {
        1 + self.thresholds.iter().filter(|&&th| score >= th).count() as u8
    }

    pub fn validate(&self) -> Result<()> {
        let ws = [self.w_speed, self.w_jerk, self.w_cong];
        if ws.iter().any(|w| !(0.0..=1.0).contains(w)) {
            return Err(Error::invalid("profile weights", "each weight must be in [0, 1]"));
        }
        let sum: f64 = ws.iter().sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(Error::invalid("profile weights", format!("sum to {sum}, expected 1")));
        }
        let th = self.thresholds;
        if !(th[0] > 0.0 && th.windows(2).all(|p| p[0] < p[1])) {
            return Err(Error::invalid("thresholds", "must be positive and strictly increasing"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioScript {
    pub trip_id: String,
    pub commuter_id: String,
    pub start_clock: ClockTime,
    /// Seconds.
    pub trip_duration: f64,
    /// Seconds between sensor samples.
    pub sample_period: f64,
    /// Feature window, seconds.
    pub window: f64,
    /// Preferred cruising speed, m/s.
    pub cruise_speed: f64,
    pub speed_process: TemporalHawkesParams,
    pub jerk_process: SpatioTemporalHawkesParams,
    pub congestion_process: SpatioTemporalHawkesParams,
    pub anomaly_intervals: Vec<AnomalyInterval>,
    pub profile: CommuterProfile,
}

impl Default for ScenarioScript {
    fn default() -> Self {
        ScenarioScript {
            trip_id: "trip-0".into(),
            commuter_id: "commuter-0".into(),
            start_clock: ClockTime::new(8, 30).expect("valid clock"),
            trip_duration: 1500.0,
            sample_period: 1.0,
            window: 5.0,
            cruise_speed: 12.0,
            speed_process: TemporalHawkesParams { mu: 0.01, alpha: 0.1, beta: 0.5 },
            jerk_process: SpatioTemporalHawkesParams { mu: 0.05, alpha: 0.2, beta: 1.0, sigma_s: 0.05 },
            congestion_process: SpatioTemporalHawkesParams {
                mu: 0.01,
                alpha: 0.002,
                beta: 1.0 / 60.0,
                sigma_s: 0.05,
            },
            anomaly_intervals: Vec::new(),
            profile: CommuterProfile::default(),
        }
    }
}

impl ScenarioScript {
    pub fn validate(&self) -> Result<()> {
        for (field, id) in [("trip_id", &self.trip_id), ("commuter_id", &self.commuter_id)] {
            if id.is_empty() || id.chars().any(|c| c.is_whitespace() || c == '=') {
                return Err(Error::invalid(field, format!("{id:?} must be a non-empty token")));
            }
        }
        for (field, v) in [
            ("trip_duration", self.trip_duration),
            ("sample_period", self.sample_period),
            ("window", self.window),
            ("cruise_speed", self.cruise_speed),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(field, format!("{v} must be positive")));
            }
        }
        self.speed_process.validate()?;
        self.jerk_process.validate()?;
        self.congestion_process.validate()?;
        for a in &self.anomaly_intervals {
            if !(a.t_start >= 0.0 && a.t_start < a.t_end && a.t_end <= self.trip_duration) {
                return Err(Error::invalid(
                    "anomaly",
                    format!("interval [{}, {}) not inside the trip", a.t_start, a.t_end),
                ));
            }
            if !(a.intensity_multiplier.is_finite() && a.intensity_multiplier > 0.0) {
                return Err(Error::invalid("anomaly", "multiplier must be positive"));
            }
        }
        self.profile.validate()
    }

    /// Product of the multipliers of every interval on `kind` overlapping
    /// `[a, b)`; 1 when none does.
    pub fn multiplier(&self, kind: FeatureKind, a: f64, b: f64) -> f64 {
        self.anomaly_intervals
            .iter()
            .filter(|iv| iv.feature == kind && iv.overlaps(a, b))
            .map(|iv| iv.intensity_multiplier)
            .product()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut s = ScenarioScript {
            anomaly_intervals: Vec::new(),
            ..Default::default()
        };
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::Parse { line, msg: format!("expected key = value, got {content:?}") })?;
            let num = |v: &str| -> Result<f64> {
                v.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::Parse { line, msg: format!("{key}: {v:?} is not a number") })
            };
            match key {
                "trip_id" => s.trip_id = value.to_owned(),
                "commuter_id" => s.commuter_id = value.to_owned(),
                "start_clock" => {
                    s.start_clock = value.parse().map_err(|e: Error| Error::Parse { line, msg: e.to_string() })?
                }
                "trip_duration" => s.trip_duration = num(value)?,
                "sample_period" => s.sample_period = num(value)?,
                "window" => s.window = num(value)?,
                "cruise_speed" => s.cruise_speed = num(value)?,
                "speed.mu" => s.speed_process.mu = num(value)?,
                "speed.alpha" => s.speed_process.alpha = num(value)?,
                "speed.beta" => s.speed_process.beta = num(value)?,
                "jerk.mu" => s.jerk_process.mu = num(value)?,
                "jerk.alpha" => s.jerk_process.alpha = num(value)?,
                "jerk.beta" => s.jerk_process.beta = num(value)?,
                "jerk.sigma_s" => s.jerk_process.sigma_s = num(value)?,
                "congestion.mu" => s.congestion_process.mu = num(value)?,
                "congestion.alpha" => s.congestion_process.alpha = num(value)?,
                "congestion.beta" => s.congestion_process.beta = num(value)?,
                "congestion.sigma_s" => s.congestion_process.sigma_s = num(value)?,
                "w_speed" => s.profile.w_speed = num(value)?,
                "w_jerk" => s.profile.w_jerk = num(value)?,
                "w_cong" => s.profile.w_cong = num(value)?,
                "thresholds" => {
                    let vals = value.split_whitespace().map(num).collect::<Result<Vec<_>>>()?;
                    s.profile.thresholds = vals.try_into().map_err(|v: Vec<f64>| Error::Parse {
                        line,
                        msg: format!("thresholds needs 4 values, got {}", v.len()),
                    })?;
                }
                "anomaly" => {
                    let toks: Vec<&str> = value.split_whitespace().collect();
                    let [a, b, f, m] = toks[..] else {
                        return Err(Error::Parse { line, msg: "anomaly = <t_start> <t_end> <feature> <multiplier>".into() });
                    };
                    s.anomaly_intervals.push(AnomalyInterval {
                        t_start: num(a)?,
                        t_end: num(b)?,
                        feature: f.parse().map_err(|e: Error| Error::Parse { line, msg: e.to_string() })?,
                        intensity_multiplier: num(m)?,
                    });
                }
                _ => {}
            }
        }
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&fsutil::read_to_string(path)?)
    }

    pub fn render(&self) -> String {
        let mut o = String::new();
        let _ = writeln!(o, "trip_id = {}", self.trip_id);
        let _ = writeln!(o, "commuter_id = {}", self.commuter_id);
        let _ = writeln!(o, "start_clock = {}", self.start_clock);
        let _ = writeln!(o, "trip_duration = {}", self.trip_duration);
        let _ = writeln!(o, "sample_period = {}", self.sample_period);
        let _ = writeln!(o, "window = {}", self.window);
        let _ = writeln!(o, "cruise_speed = {}", self.cruise_speed);
        let sp = &self.speed_process;
        let _ = writeln!(o, "speed.mu = {}\nspeed.alpha = {}\nspeed.beta = {}", sp.mu, sp.alpha, sp.beta);
        for (name, p) in [("jerk", &self.jerk_process), ("congestion", &self.congestion_process)] {
            let _ = writeln!(
                o,
                "{name}.mu = {}\n{name}.alpha = {}\n{name}.beta = {}\n{name}.sigma_s = {}",
                p.mu, p.alpha, p.beta, p.sigma_s
            );
        }
        let pr = &self.profile;
        let _ = writeln!(o, "w_speed = {}\nw_jerk = {}\nw_cong = {}", pr.w_speed, pr.w_jerk, pr.w_cong);
        let th = pr.thresholds;
        let _ = writeln!(o, "thresholds = {} {} {} {}", th[0], th[1], th[2], th[3]);
        for a in &self.anomaly_intervals {
            let _ = writeln!(o, "anomaly = {} {} {} {}", a.t_start, a.t_end, a.feature, a.intensity_multiplier);
        }
        o
    }
}
