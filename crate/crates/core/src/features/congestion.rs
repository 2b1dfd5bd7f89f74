//! Congestion level from the stop-move pattern of the vehicle.
//!
//! A stop starts once speed has stayed below [`STOP_SPEED_MS`] for
//! [`STOP_HOLD_S`]; it ends once speed has stayed at or above it for the
//! same hold time. The period of a stop-move cycle is measured from one
//! stop's start to the next stop's start.

pub const STOP_SPEED_MS: f64 = 0.5;
pub const STOP_HOLD_S: f64 = 5.0;

const MEDIUM_S: f64 = 60.0;
const HIGH_S: f64 = 300.0;

/// Level for a completed cycle: 1 for 1 min ≤ t_sm < 5 min, 2 for
/// t_sm ≥ 5 min, 0 otherwise.
pub fn classify_cycle(t_sm: f64) -> u8 {
    if t_sm >= HIGH_S {
        2
    } else if t_sm >= MEDIUM_S {
        1
    } else {
        0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Motion {
    Moving { below_since: Option<f64> },
    Stopped { above_since: Option<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CongestionTracker {
    motion: Motion,
    last_stop_start: Option<f64>,
    level: u8,
}

impl Default for CongestionTracker {
    fn default() -> Self {
        Self::new()
    }
}

impl CongestionTracker {
    pub fn new() -> Self {
        CongestionTracker {
            motion: Motion::Moving { below_since: None },
            last_stop_start: None,
            level: 0,
        }
    }

    /// Feeds one sample; returns the level after it.
    pub fn push(&mut self, t: f64, speed: f64) -> u8 {
        let slow = speed < STOP_SPEED_MS;
        self.motion = match self.motion {
            Motion::Moving { below_since } => {
                let since = if slow { below_since.or(Some(t)) } else { None };
                match since {
                    Some(start) if t - start >= STOP_HOLD_S => {
                        if let Some(prev) = self.last_stop_start {
                            self.level = classify_cycle(start - prev);
                        }
                        self.last_stop_start = Some(start);
                        Motion::Stopped { above_since: None }
                    }
                    _ => Motion::Moving { below_since: since },
                }
            }
            Motion::Stopped { above_since } => {
                let since = if slow { None } else { above_since.or(Some(t)) };
                match since {
                    Some(start) if t - start >= STOP_HOLD_S => Motion::Moving { below_since: None },
                    _ => Motion::Stopped { above_since: since },
                }
            }
        };
        self.level
    }

    pub fn level(&self) -> u8 {
        self.level
    }

    pub fn is_stopped(&self) -> bool {
        matches!(self.motion, Motion::Stopped { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Speed profile at 1 Hz: stop for `stop_s`, then move until the next
    /// stop starts `period_s` after the previous one.
    fn run_cycles(period_s: usize, stop_s: usize, cycles: usize) -> Vec<u8> {
        let mut tr = CongestionTracker::new();
        let mut out = Vec::new();
        for i in 0..period_s * cycles + stop_s + 10 {
            let phase = i % period_s;
            let v = if phase < stop_s { 0.0 } else { 8.0 };
            out.push(tr.push(i as f64, v));
        }
        out
    }

    #[test]
    fn free_flow_is_zero() {
        let mut tr = CongestionTracker::new();
        for i in 0..2000 {
            assert_eq!(tr.push(i as f64, 3.0 + (i % 7) as f64), 0);
        }
    }

    #[test]
    fn three_minute_cycle_is_medium() {
        let levels = run_cycles(180, 20, 2);
        assert_eq!(*levels.last().unwrap(), 1);
    }

    #[test]
    fn six_minute_cycle_is_high() {
        let levels = run_cycles(360, 20, 2);
        assert_eq!(*levels.last().unwrap(), 2);
    }

    #[test]
    fn short_cycles_are_free_flow() {
        let levels = run_cycles(40, 10, 5);
        assert!(levels.iter().all(|&l| l == 0));
    }

    #[test]
    fn boundaries_follow_thresholds() {
        assert_eq!(classify_cycle(59.999), 0);
        assert_eq!(classify_cycle(60.0), 1);
        assert_eq!(classify_cycle(299.999), 1);
        assert_eq!(classify_cycle(300.0), 2);
    }

    #[test]
    fn level_changes_only_when_a_cycle_completes() {
        // first stop at 0 s, second at 180 s: level must stay 0 until the
        // second stop is confirmed at 185 s
        let levels = run_cycles(180, 20, 1);
        assert!(levels[..185].iter().all(|&l| l == 0));
        assert_eq!(levels[185], 1);
    }

    #[test]
    fn short_dip_is_not_a_stop() {
        let mut tr = CongestionTracker::new();
        for i in 0..100 {
            let v = if (10..13).contains(&i) { 0.0 } else { 5.0 };
            tr.push(i as f64, v);
            assert!(!tr.is_stopped());
        }
    }
}
