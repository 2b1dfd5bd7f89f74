use crate::trip::ClockTime;

/// Time-of-day zone of `start + elapsed_s`:
/// 06-10 → 0, 10-16 → 1, 16-22 → 2, 22-06 → 3, each half-open.
pub fn time_zone(start: ClockTime, elapsed_s: f64) -> u8 {
    let secs = (f64::from(start.seconds_since_midnight()) + elapsed_s).rem_euclid(86_400.0);
    let hour = (secs / 3600.0).floor() as u32;
    match hour {
        6..=9 => 0,
        10..=15 => 1,
        16..=21 => 2,
        _ => 3,
    }
}
