use super::roc::average_ranks;
use crate::error::{Error, Result};

/// Kendall's coefficient of concordance for `ratings[system][item]`.
///
/// Scores are ranked per system with average ranks for ties. The usual
/// tie correction is subtracted from the denominator, which leaves the
/// tie-free value unchanged and lets two identical tied rankings reach 1.
pub fn kendall_w(ratings: &[Vec<f64>]) -> Result<f64> {
    let m = ratings.len();
    if m < 2 {
        return Err(Error::InsufficientData(format!("{m} rating systems, need at least 2")));
    }
    let n = ratings[0].len();
    if n < 2 {
        return Err(Error::InsufficientData(format!("{n} items, need at least 2")));
    }
    if ratings.iter().any(|r| r.len() != n) {
        return Err(Error::invalid("ratings", "systems rate different numbers of items"));
    }
    if let Some(&bad) = ratings.iter().flatten().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(bad));
    }
    let mut sums = vec![0.0; n];
    let mut ties = 0.0;
    for row in ratings {
        let ranks = average_ranks(row);
        for (s, r) in sums.iter_mut().zip(&ranks) {
            *s += r;
        }
        let mut sorted = row.clone();
        sorted.sort_by(f64::total_cmp);
        for group in sorted.chunk_by(|a, b| a == b) {
            let t = group.len() as f64;
            ties += t * t * t - t;
        }
    }
    let (mf, nf) = (m as f64, n as f64);
    let mean = mf * (nf + 1.0) / 2.0;
    let s: f64 = sums.iter().map(|r| (r - mean).powi(2)).sum();
    let denom = mf * mf * (nf * nf * nf - nf) - mf * ties;
    if denom <= 0.0 {
        // every system rates every item the same
        return Err(Error::ZeroVariance);
    }
    Ok(12.0 * s / denom)
}
