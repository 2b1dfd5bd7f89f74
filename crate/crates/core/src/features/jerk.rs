use crate::error::{Error, Result};
use crate::trip::SensorSample;

/// Jerk over one window: least-squares slope of `accel_y` against `t`.
pub fn jerk(window: &[SensorSample]) -> Result<f64> {
    if window.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "jerk needs at least 2 samples, window has {}",
            window.len()
        )));
    }
    let n = window.len() as f64;
    let t_mean = window.iter().map(|s| s.t).sum::<f64>() / n;
    let a_mean = window.iter().map(|s| s.accel_y).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for s in window {
        let dt = s.t - t_mean;
        sxy += dt * (s.accel_y - a_mean);
        sxx += dt * dt;
    }
    Ok(sxy / sxx)
}
