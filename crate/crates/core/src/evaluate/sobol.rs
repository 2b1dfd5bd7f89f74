use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::seeded;

pub const MIN_BASE_SAMPLES: usize = 256;
pub const BOOTSTRAP_RESAMPLES: usize = 200;
/// Sobol point sets are available up to 256 dimensions, two per input.
pub const MAX_INPUTS: usize = 128;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolResult {
    /// Total-order index per input.
    pub total: Vec<f64>,
    /// 95% bootstrap half-width per input.
    pub half_width: Vec<f64>,
    pub base_samples: usize,
    pub evaluations: usize,
}

/// Total-order indices by Saltelli sampling and the Jansen estimator.
///
/// Inputs are independent and uniform over `ranges`, sampled from an
/// Owen-scrambled Sobol sequence. `model` must be
/// deterministic; it is evaluated in parallel and results are gathered
/// in sample order, so the output depends only on `seed`.
pub fn sobol_total_order<F>(model: F, ranges: &[(f64, f64)], n: usize, seed: u64) -> Result<SobolResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let k = ranges.len();
    if k == 0 {
        return Err(Error::param("ranges", "need at least one input"));
    }
    if n < MIN_BASE_SAMPLES {
        return Err(Error::param("n", format!("{n} base samples, need at least {MIN_BASE_SAMPLES}")));
    }
    for &(lo, hi) in ranges {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::param("ranges", format!("bad range [{lo}, {hi}]")));
        }
    }
    if k > MAX_INPUTS {
        return Err(Error::param("ranges", format!("{k} inputs, at most {MAX_INPUTS} supported")));
    }
    let n32 = u32::try_from(n).map_err(|_| Error::param("n", "too many base samples"))?;
    // A and B are the two halves of one scrambled Sobol point set
    let scramble = (seed ^ (seed >> 32)) as u32;
    let draw = |offset: usize| -> Vec<f64> {
        (0..n32)
            .flat_map(|r| {
                ranges.iter().enumerate().map(move |(i, &(lo, hi))| {
                    let u = f64::from(sobol_burley::sample(r, (offset + i) as u32, scramble));
                    lo + (hi - lo) * u
                })
            })
            .collect()
    };
    let a = draw(0);
    let b = draw(k);
    let eval = |m: &[f64]| -> Vec<f64> { m.par_chunks(k).map(&model).collect() };
    let fa = eval(&a);
    let fb = eval(&b);
    let fab: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            let mut ab = a.clone();
            for r in 0..n {
                ab[r * k + i] = b[r * k + i];
            }
            eval(&ab)
        })
        .collect();
    if let Some(&bad) = fa.iter().chain(&fb).chain(fab.iter().flatten()).find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(bad));
    }

    let estimate = |rows: &[usize]| -> Option<Vec<f64>> {
        let m = rows.len() as f64 * 2.0;
        let mean = rows.iter().map(|&r| fa[r] + fb[r]).sum::<f64>() / m;
        let var = rows.iter().map(|&r| (fa[r] - mean).powi(2) + (fb[r] - mean).powi(2)).sum::<f64>() / m;
        if var <= 1e-300 {
            return None;
        }
        Some(
            fab.iter()
                .map(|fi| rows.iter().map(|&r| (fa[r] - fi[r]).powi(2)).sum::<f64>() / (2.0 * rows.len() as f64 * var))
                .collect(),
        )
    };
    let all: Vec<usize> = (0..n).collect();
    let total = estimate(&all).ok_or(Error::ZeroVariance)?;

    let mut rng = seeded(seed);
    let mut boot: Vec<Vec<f64>> = vec![Vec::with_capacity(BOOTSTRAP_RESAMPLES); k];
    let mut rows = vec![0; n];
    for _ in 0..BOOTSTRAP_RESAMPLES {
        rows.iter_mut().for_each(|r| *r = rng.random_range(0..n));
        if let Some(est) = estimate(&rows) {
            for (b, e) in boot.iter_mut().zip(est) {
                b.push(e);
            }
        }
    }
    let half_width = boot
        .iter()
        .map(|v| {
            if v.len() < 2 {
                return f64::NAN;
            }
            let mu = v.iter().sum::<f64>() / v.len() as f64;
            let sd = (v.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt();
            1.96 * sd
        })
        .collect();
    Ok(SobolResult { total, half_width, base_samples: n, evaluations: n * (k + 2) })
}
