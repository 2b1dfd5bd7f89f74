//! Self-exciting point processes sampled by Ogata thinning.
//!
//! Temporal intensity: `λ(t) = m(t)·μ + Σ_{t_i < t} α·exp(−β(t − t_i))`.
//! Spatio-temporal intensity adds an isotropic Gaussian spatial kernel of
//! bandwidth `σ_s` around each parent event. `m(t)` is a piecewise-constant
//! multiplier on the background rate used to inject anomalous stretches.

use rand::Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemporalHawkesParams {
    /// Background rate, events/s.
    pub mu: f64,
    /// Jump in intensity per event, events/s.
    pub alpha: f64,
    /// Kernel decay rate, 1/s.
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatioTemporalHawkesParams {
    /// Background rate, events/(s·km²).
    pub mu: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Spatial kernel bandwidth, km.
    pub sigma_s: f64,
}

fn check_stable(mu: f64, alpha: f64, beta: f64) -> Result<()> {
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::param("mu", format!("{mu} must be positive")));
    }
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::param("alpha", format!("{alpha} must be non-negative")));
    }
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::param("beta", format!("{beta} must be positive")));
    }
    let ratio = alpha / beta;
    if ratio >= 1.0 {
        return Err(Error::UnstableProcess { ratio });
    }
    Ok(())
}

impl TemporalHawkesParams {
    pub fn validate(&self) -> Result<()> {
        check_stable(self.mu, self.alpha, self.beta)
    }

    pub fn branching_ratio(&self) -> f64 {
        self.alpha / self.beta
    }

    /// Expected number of events on `[0, horizon]` started from an empty
    /// history.
    pub fn expected_count(&self, horizon: f64) -> f64 {
        let n = self.branching_ratio();
        let k = self.beta - self.alpha;
        // E[N(T)] = μT/(1−n) − μ n (1 − e^{−kT}) / (k (1−n))
        self.mu * horizon / (1.0 - n) - self.mu * n * (1.0 - (-k * horizon).exp()) / (k * (1.0 - n))
    }

    /// Expected intensity at time `t` from an empty history.
    pub fn expected_intensity(&self, t: f64) -> f64 {
        let k = self.beta - self.alpha;
        self.mu * (self.beta - self.alpha * (-k * t).exp()) / k
    }
}

impl SpatioTemporalHawkesParams {
    pub fn validate(&self) -> Result<()> {
        check_stable(self.mu, self.alpha, self.beta)?;
        if !(self.sigma_s.is_finite() && self.sigma_s > 0.0) {
            return Err(Error::param("sigma_s", format!("{} must be positive", self.sigma_s)));
        }
        Ok(())
    }
}

/// Axis-aligned box in km.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Region {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Region { x_min, x_max, y_min, y_max }
    }

    pub fn area(&self) -> f64 {
        (self.x_max - self.x_min).max(0.0) * (self.y_max - self.y_min).max(0.0)
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x_min && x <= self.x_max && y >= self.y_min && y <= self.y_max
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StEvent {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    /// Index of the triggering event, `None` for background events.
    pub parent: Option<usize>,
}

/// Piecewise-constant multiplier on a process's background rate.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RateBoost {
    spans: Vec<(f64, f64, f64)>,
}

impl RateBoost {
    pub fn none() -> Self {
        RateBoost::default()
    }

    /// Adds a `[start, end)` span during which the background rate is
    /// multiplied by `factor`. Overlapping spans multiply.
    pub fn with_span(mut self, start: f64, end: f64, factor: f64) -> Self {
        self.spans.push((start, end, factor));
        self
    }

    pub fn factor_at(&self, t: f64) -> f64 {
        self.spans
            .iter()
            .filter(|&&(a, b, _)| t >= a && t < b)
            .map(|&(_, _, f)| f)
            .product()
    }

    /// First span boundary strictly after `t`, if any.
    fn next_change(&self, t: f64) -> Option<f64> {
        self.spans
            .iter()
            .flat_map(|&(a, b, _)| [a, b])
            .filter(|&x| x > t)
            .min_by(f64::total_cmp)
    }
}

/// Exponentially decaying excitation sum, advanced lazily in time.
struct Excitation {
    value: f64,
    at: f64,
    beta: f64,
}

impl Excitation {
    fn at(&mut self, t: f64) -> f64 {
        self.value *= (-self.beta * (t - self.at)).exp();
        self.at = t;
        self.value
    }
}

/// Shared thinning loop. `accept` is called for each candidate that
/// survives the intensity test and decides whether an event is recorded
/// (spatial sampling may still reject it).
fn thin<R: Rng + ?Sized>(
    background: f64,
    alpha: f64,
    beta: f64,
    horizon: f64,
    boost: &RateBoost,
    rng: &mut R,
    mut accept: impl FnMut(&mut R, f64, f64, f64) -> bool,
) {
    let mut exc = Excitation { value: 0.0, at: 0.0, beta };
    let mut t = 0.0;
    while t < horizon {
        let bg = background * boost.factor_at(t);
        let bound = bg + exc.at(t);
        let limit = boost.next_change(t).unwrap_or(f64::INFINITY).min(horizon);
        if bound <= 0.0 {
            t = limit;
            continue;
        }
        let wait = Exp::new(bound).expect("positive rate").sample(rng);
        if t + wait >= limit {
            // rate bound changes at `limit`; restart from there
            t = limit;
            if limit >= horizon {
                break;
            }
            continue;
        }
        t += wait;
        let excitation = exc.at(t);
        let total = bg + excitation;
        let u: f64 = rng.random();
        if u * bound <= total && accept(rng, t, bg, excitation) {
            exc.value += alpha;
        }
    }
}

/// Event times in `(0, horizon]` of a temporal Hawkes process.
pub fn simulate_hawkes<R: Rng + ?Sized>(
    params: &TemporalHawkesParams,
    horizon: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    simulate_hawkes_boosted(params, horizon, &RateBoost::none(), rng)
}

pub fn simulate_hawkes_boosted<R: Rng + ?Sized>(
    params: &TemporalHawkesParams,
    horizon: f64,
    boost: &RateBoost,
    rng: &mut R,
) -> Result<Vec<f64>> {
    params.validate()?;
    let mut events = Vec::new();
    thin(params.mu, params.alpha, params.beta, horizon, boost, rng, |_, t, _, _| {
        events.push(t);
        true
    });
    Ok(events)
}

/// Events of a spatio-temporal Hawkes process on `region`.
pub fn simulate_st_hawkes<R: Rng + ?Sized>(
    params: &SpatioTemporalHawkesParams,
    horizon: f64,
    region: &Region,
    rng: &mut R,
) -> Result<Vec<StEvent>> {
    simulate_st_hawkes_boosted(params, horizon, region, &RateBoost::none(), rng)
}

pub fn simulate_st_hawkes_boosted<R: Rng + ?Sized>(
    params: &SpatioTemporalHawkesParams,
    horizon: f64,
    region: &Region,
    boost: &RateBoost,
    rng: &mut R,
) -> Result<Vec<StEvent>> {
    params.validate()?;
    let area = region.area();
    if !(area > 0.0 && area.is_finite()) {
        return Err(Error::EmptyRegion);
    }
    let kernel = Normal::new(0.0, params.sigma_s).expect("positive bandwidth");
    let (alpha, beta) = (params.alpha, params.beta);
    let mut events: Vec<StEvent> = Vec::new();

    thin(params.mu * area, alpha, beta, horizon, boost, rng, |rng, t, bg, excitation| {
        let total = bg + excitation;
        let pick = rng.random::<f64>() * total;
        let event = if pick < bg || events.is_empty() {
            StEvent {
                t,
                x: rng.random_range(region.x_min..region.x_max),
                y: rng.random_range(region.y_min..region.y_max),
                parent: None,
            }
        } else {
            // choose a parent with probability proportional to its
            // current contribution to the excitation
            let mut target = pick - bg;
            let mut chosen = events.len() - 1;
            for (i, e) in events.iter().enumerate() {
                let w = alpha * (-beta * (t - e.t)).exp();
                if target < w {
                    chosen = i;
                    break;
                }
                target -= w;
            }
            let p = events[chosen];
            StEvent {
                t,
                x: p.x + kernel.sample(rng),
                y: p.y + kernel.sample(rng),
                parent: Some(chosen),
            }
        };
        if region.contains(event.x, event.y) {
            events.push(event);
            true
        } else {
            false
        }
    });
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(mu: f64, alpha: f64, beta: f64) -> TemporalHawkesParams {
        TemporalHawkesParams { mu, alpha, beta }
    }

    #[test]
    fn zero_horizon_is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(simulate_hawkes(&params(0.5, 0.2, 1.0), 0.0, &mut rng).unwrap().is_empty());
    }

    #[test]
    fn unstable_parameters_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (a, b) in [(1.0, 1.0), (2.0, 1.0)] {
            let err = simulate_hawkes(&params(0.1, a, b), 10.0, &mut rng).unwrap_err();
            assert!(matches!(err, Error::UnstableProcess { .. }));
        }
        let st = SpatioTemporalHawkesParams { mu: 0.1, alpha: 3.0, beta: 1.0, sigma_s: 0.1 };
        let region = Region::new(0.0, 1.0, 0.0, 1.0);
        assert!(simulate_st_hawkes(&st, 10.0, &region, &mut rng).is_err());
    }

    #[test]
    fn events_sorted_within_horizon() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ev = simulate_hawkes(&params(0.3, 0.6, 1.0), 500.0, &mut rng).unwrap();
        assert!(!ev.is_empty());
        assert!(ev.windows(2).all(|w| w[0] < w[1]));
        assert!(ev.iter().all(|&t| t > 0.0 && t <= 500.0));
    }

    #[test]
    fn same_seed_same_events() {
        let p = params(0.2, 0.5, 2.0);
        let a = simulate_hawkes(&p, 300.0, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let b = simulate_hawkes(&p, 300.0, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn poisson_limit_mean_count() {
        let (mu, horizon, runs) = (0.5, 200.0, 2000);
        let p = params(mu, 0.0, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let total: usize = (0..runs)
            .map(|_| simulate_hawkes(&p, horizon, &mut rng).unwrap().len())
            .sum();
        let mean = total as f64 / runs as f64;
        let tol = 3.0 * (mu * horizon / runs as f64).sqrt();
        assert!((mean - mu * horizon).abs() <= tol, "mean {mean}");
    }

    #[test]
    fn expected_count_matches_long_run_limit() {
        let p = params(0.1, 0.5, 1.0);
        // the transient term is negligible after 1000 s
        let limit = p.mu * 1000.0 / (1.0 - p.branching_ratio());
        assert!((p.expected_count(1000.0) - limit).abs() < 0.2);
        assert!((p.expected_intensity(0.0) - p.mu).abs() < 1e-12);
    }

    #[test]
    fn boosted_background_raises_rate_only_inside_span() {
        let p = params(0.05, 0.0, 1.0);
        let boost = RateBoost::none().with_span(100.0, 200.0, 10.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (mut inside, mut outside) = (0usize, 0usize);
        for _ in 0..400 {
            for t in simulate_hawkes_boosted(&p, 300.0, &boost, &mut rng).unwrap() {
                if (100.0..200.0).contains(&t) {
                    inside += 1;
                } else {
                    outside += 1;
                }
            }
        }
        // expected 0.5/s·100 s vs 0.05/s·200 s per run
        let (ei, eo) = (400.0 * 50.0, 400.0 * 10.0);
        assert!((inside as f64 - ei).abs() < 4.0 * ei.sqrt());
        assert!((outside as f64 - eo).abs() < 4.0 * eo.sqrt());
    }

    #[test]
    fn st_empty_region_rejected() {
        let p = SpatioTemporalHawkesParams { mu: 0.1, alpha: 0.1, beta: 1.0, sigma_s: 0.1 };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let err = simulate_st_hawkes(&p, 10.0, &Region::new(0.0, 0.0, 0.0, 1.0), &mut rng).unwrap_err();
        assert!(matches!(err, Error::EmptyRegion));
    }

    #[test]
    fn st_events_stay_in_region() {
        let p = SpatioTemporalHawkesParams { mu: 0.5, alpha: 0.7, beta: 1.0, sigma_s: 0.3 };
        let region = Region::new(0.0, 1.0, 0.0, 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ev = simulate_st_hawkes(&p, 100.0, &region, &mut rng).unwrap();
        assert!(ev.iter().all(|e| region.contains(e.x, e.y)));
        assert!(ev.iter().any(|e| e.parent.is_some()));
        assert!(ev.windows(2).all(|w| w[0].t < w[1].t));
    }
}
