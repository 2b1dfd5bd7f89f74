use crate::error::{Error, Result};

/// Upper bounds of the ISO 2631-1 comfort bands, m/s².
pub const ISO_BANDS: [f64; 5] = [0.315, 0.5, 0.8, 1.25, 2.5];

/// Total weighted RMS acceleration and its comfort band 1..=6.
pub fn iso_comfort(ax: f64, ay: f64, az: f64) -> Result<(f64, u8)> {
    for v in [ax, ay, az] {
        if !v.is_finite() {
            return Err(Error::NonFinite(v));
        }
    }
    let a_v = ((1.4 * ax).powi(2) + (1.4 * ay).powi(2) + az * az).sqrt();
    let level = 1 + ISO_BANDS.iter().filter(|&&b| a_v > b).count() as u8;
    Ok((a_v, level))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relabel {
    FiveToThree,
    SixToThree,
}

/// Collapse a Likert level to three classes.
pub fn relabel(level: u8, scheme: Relabel) -> Result<u8> {
    let mapped = match (scheme, level) {
        (Relabel::FiveToThree, 1 | 2) => 1,
        (Relabel::FiveToThree, 3) => 2,
        (Relabel::FiveToThree, 4 | 5) => 3,
        (Relabel::SixToThree, 1 | 2) => 1,
        (Relabel::SixToThree, 3 | 4) => 2,
        (Relabel::SixToThree, 5 | 6) => 3,
        (_, v) => return Err(Error::OutOfRange { what: "likert level", value: v as i64 }),
    };
    Ok(mapped)
}
