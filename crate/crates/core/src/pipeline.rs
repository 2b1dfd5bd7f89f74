//! Trip → windows → per-feature discomfort likelihoods → feature vectors →
//! comfort predictions and a trip report.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{Expose, ExposeConfig, RelativeEntropy, RelativeEntropyConfig};
use crate::error::{Error, Result};
use crate::evaluate::{kendall_w, multiclass_auc, sobol_total_order, KvReport, RocResult, SobolResult};
use crate::features::{windows, FeatureKind, SmootherConfig, WindowObservation};
use crate::htm::{HtmConfig, HtmDetector};
use crate::mtl::{FeedbackQueue, LabeledWindow, MtlModel, Query, Dataset, DEFAULT_GAP};
use crate::rng::stream;
use crate::scalar::Scalar;
use crate::stream::StreamingDetector;
use crate::trip::{FeatureVector, IndicatorVector, TripRecord};

pub const DEFAULT_BOOTSTRAP_MINUTES: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectorKind {
    #[default]
    Htm,
    Re,
    Expose,
}

impl DetectorKind {
    pub const ALL: [DetectorKind; 3] = [DetectorKind::Htm, DetectorKind::Re, DetectorKind::Expose];

    pub fn name(self) -> &'static str {
        match self {
            DetectorKind::Htm => "htm",
            DetectorKind::Re => "re",
            DetectorKind::Expose => "expose",
        }
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DetectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DetectorKind::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::param("detector", format!("{s:?} is not one of htm, re, expose")))
    }
}

/// Encoder span per feature; values outside are clipped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureRanges {
    /// m/s
    pub speed: (f64, f64),
    /// m/s³
    pub jerk: (f64, f64),
    pub congestion: (f64, f64),
}

impl Default for FeatureRanges {
    fn default() -> Self {
        FeatureRanges { speed: (0.0, 24.0), jerk: (-2.0, 2.0), congestion: (0.0, 2.0) }
    }
}

impl FeatureRanges {
    pub fn get(&self, kind: FeatureKind) -> (f64, f64) {
        match kind {
            FeatureKind::Speed => self.speed,
            FeatureKind::Jerk => self.jerk,
            FeatureKind::Congestion => self.congestion,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectionConfig {
    pub detector: DetectorKind,
    pub bootstrap_minutes: f64,
    pub ranges: FeatureRanges,
    pub smoother: SmootherConfig,
    /// Encoder range is taken from `ranges`.
    pub htm: HtmConfig,
    /// Histogram range is taken from `ranges`.
    pub re: RelativeEntropyConfig,
    pub expose: ExposeConfig,
    pub gap_threshold: f64,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        DetectionConfig {
            detector: DetectorKind::Htm,
            bootstrap_minutes: DEFAULT_BOOTSTRAP_MINUTES,
            ranges: FeatureRanges::default(),
            smoother: SmootherConfig::default(),
            htm: HtmConfig::default(),
            re: RelativeEntropyConfig::default(),
            expose: ExposeConfig::default(),
            gap_threshold: DEFAULT_GAP,
        }
    }
}

impl DetectionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.bootstrap_minutes.is_finite() && self.bootstrap_minutes >= 0.0) {
            return Err(Error::param("bootstrap_minutes", "must be non-negative"));
        }
        self.smoother.validate()?;
        for f in FeatureKind::ALL {
            let (lo, hi) = self.ranges.get(f);
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::param("ranges", format!("{f}: [{lo}, {hi}] is empty")));
            }
        }
        Ok(())
    }

    pub fn bootstrap_windows(&self, window: f64) -> usize {
        (self.bootstrap_minutes * 60.0 / window).round() as usize
    }

    fn detector<T: Scalar>(&self, kind: FeatureKind, seed: u64) -> Result<Box<dyn StreamingDetector<T>>> {
        let (lo, hi) = self.ranges.get(kind);
        Ok(match self.detector {
            DetectorKind::Htm => {
                let mut cfg = self.htm;
                cfg.encoder.min = lo;
                cfg.encoder.max = hi;
                Box::new(HtmDetector::<T>::new(cfg, seed)?)
            }
            DetectorKind::Re => Box::new(RelativeEntropy::<T>::new(RelativeEntropyConfig { min: lo, max: hi, ..self.re })?),
            DetectorKind::Expose => Box::new(Expose::<T>::new(self.expose)?),
        })
    }
}

/// FNV-1a, so per-trip detector seeds depend on the trip id and not on
/// the order trips are processed in.
pub fn trip_seed(seed: u64, trip_id: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed;
    for b in trip_id.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Detector output for one trip. `likelihood[k]` belongs to
/// `observations[k]`; the first `bootstrap` windows are learning only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripTrace {
    pub trip_id: String,
    pub commuter_id: String,
    pub detector: DetectorKind,
    pub window: f64,
    pub bootstrap: usize,
    pub observations: Vec<WindowObservation>,
    pub likelihood: Vec<[f64; 3]>,
}

impl TripTrace {
    pub fn post_bootstrap(&self) -> impl Iterator<Item = (&WindowObservation, &[f64; 3])> {
        self.observations.iter().zip(&self.likelihood).skip(self.bootstrap)
    }

    /// Model inputs for the post-bootstrap windows.
    pub fn feature_vectors(&self) -> Vec<(usize, f64, FeatureVector)> {
        self.post_bootstrap()
            .map(|(o, l)| {
                let fv = FeatureVector {
                    l_speed: l[0],
                    l_jerk: l[1],
                    l_cong: l[2],
                    travel_time: o.travel_time,
                    distance: o.distance,
                    zone: o.zone,
                };
                (o.window_index, o.window_index as f64 * self.window, fv)
            })
            .collect()
    }

    /// Per-window CSV for plotting.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("window,t,speed,jerk,congestion,l_speed,l_jerk,l_cong,bootstrap\n");
        for (k, (o, l)) in self.observations.iter().zip(&self.likelihood).enumerate() {
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                o.window_index,
                o.window_index as f64 * self.window,
                o.v,
                o.j,
                o.c,
                l[0],
                l[1],
                l[2],
                u8::from(k < self.bootstrap)
            ));
        }
        s
    }
}

/// Runs one detector per feature over the trip's windows.
pub fn detect<T: Scalar>(trip: &TripRecord, cfg: &DetectionConfig, seed: u64) -> Result<TripTrace> {
    cfg.validate()?;
    let window = trip.meta.sample_window;
    let bootstrap = cfg.bootstrap_windows(window);
    let observations = windows(trip, &cfg.smoother);
    if observations.len() <= bootstrap {
        return Err(Error::InsufficientTripLength { duration_s: trip.duration(), required_s: bootstrap as f64 * window });
    }
    let base = trip_seed(seed, &trip.meta.trip_id);
    let mut likelihood = vec![[0.0; 3]; observations.len()];
    for f in FeatureKind::ALL {
        let mut det = cfg.detector::<T>(f, base ^ (f.index() as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15))?;
        for (o, l) in observations.iter().zip(&mut likelihood) {
            l[f.index()] = det.score(T::lit(o.value(f)))?.as_f64();
        }
    }
    Ok(TripTrace {
        trip_id: trip.meta.trip_id.clone(),
        commuter_id: trip.meta.commuter_id.clone(),
        detector: cfg.detector,
        window,
        bootstrap,
        observations,
        likelihood,
    })
}

/// Detects every trip in parallel; output order follows `trips`.
pub fn detect_all<T: Scalar>(trips: &[TripRecord], cfg: &DetectionConfig, seed: u64) -> Vec<Result<TripTrace>> {
    trips.par_iter().map(|t| detect::<T>(t, cfg, seed)).collect()
}

/// Labelled post-bootstrap windows. Trips without any comfort label are
/// an error naming every such trip; trips too short for the bootstrap are
/// skipped with a warning.
pub fn build_dataset<T: Scalar>(trips: &[TripRecord], cfg: &DetectionConfig, seed: u64) -> Result<(Dataset, Vec<TripTrace>)> {
    let unlabeled: Vec<&str> = trips.iter().filter(|t| t.labels.is_empty()).map(|t| t.meta.trip_id.as_str()).collect();
    if !unlabeled.is_empty() {
        return Err(Error::invalid("labels", format!("trips without comfort labels: {}", unlabeled.join(", "))));
    }
    let mut data = Dataset::default();
    let mut traces = Vec::with_capacity(trips.len());
    for (trip, res) in trips.iter().zip(detect_all::<T>(trips, cfg, seed)) {
        let trace = match res {
            Ok(t) => t,
            Err(e @ Error::InsufficientTripLength { .. }) => {
                log::warn!("skipping trip {}: {e}", trip.meta.trip_id);
                continue;
            }
            Err(e) => return Err(e),
        };
        for (k, t, fv) in trace.feature_vectors() {
            data.push(
                &trip.meta.commuter_id,
                LabeledWindow { trip_id: trip.meta.trip_id.clone(), window_index: k, fv, level: trip.level_at(t) },
            );
        }
        traces.push(trace);
    }
    Ok((data, traces))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowPrediction {
    pub window_index: usize,
    pub t: f64,
    pub level: u8,
    pub indicator: [f64; 5],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripReport {
    pub trip_id: String,
    pub commuter_id: String,
    pub windows: Vec<WindowPrediction>,
    pub rating: u8,
    /// Percent share of speed, jerkiness and congestion.
    pub impacts: [f64; 3],
    pub queries: Vec<Query>,
}

/// Mean of the levels rounded half up.
pub fn trip_rating(levels: &[u8]) -> Result<u8> {
    if levels.is_empty() {
        return Err(Error::InsufficientData("no predicted windows".into()));
    }
    let mean = levels.iter().map(|&l| f64::from(l)).sum::<f64>() / levels.len() as f64;
    Ok((mean + 0.5).floor().clamp(1.0, 5.0) as u8)
}

/// Mean likelihood per feature as a percentage of their sum; equal thirds
/// when every likelihood is zero.
pub fn impacts(likelihoods: &[[f64; 3]]) -> [f64; 3] {
    let mut mean = [0.0; 3];
    for l in likelihoods {
        for (m, v) in mean.iter_mut().zip(l) {
            *m += v;
        }
    }
    let sum: f64 = mean.iter().sum();
    if sum <= 0.0 || !sum.is_finite() {
        return [100.0 / 3.0; 3];
    }
    mean.map(|m| 100.0 * m / sum)
}

/// Comfort predictions for the post-bootstrap windows. Ambiguous windows
/// are offered to `queue` when given.
pub fn predict_trip<T: Scalar>(
    model: &MtlModel<T>,
    trace: &TripTrace,
    gap_threshold: f64,
    mut queue: Option<&mut FeedbackQueue>,
) -> Result<TripReport> {
    if !model.is_registered(&trace.commuter_id) {
        return Err(Error::UnregisteredCommuter(trace.commuter_id.clone()));
    }
    let mut windows = Vec::new();
    let mut queries = Vec::new();
    for (k, t, fv) in trace.feature_vectors() {
        let iv: IndicatorVector<T> = model.forward(&trace.commuter_id, &fv)?;
        if let Some(q) = queue.as_deref_mut() {
            let query = Query { commuter_id: trace.commuter_id.clone(), trip_id: trace.trip_id.clone(), window_index: k, t, fv };
            if q.offer(query.clone(), &iv, T::lit(gap_threshold)) {
                queries.push(query);
            }
        }
        windows.push(WindowPrediction { window_index: k, t, level: iv.level(), indicator: iv.p.map(|p| p.as_f64()) });
    }
    let levels: Vec<u8> = windows.iter().map(|w| w.level).collect();
    let post: Vec<[f64; 3]> = trace.post_bootstrap().map(|(_, l)| *l).collect();
    Ok(TripReport {
        trip_id: trace.trip_id.clone(),
        commuter_id: trace.commuter_id.clone(),
        rating: trip_rating(&levels)?,
        impacts: impacts(&post),
        windows,
        queries,
    })
}

impl TripReport {
    pub fn to_kv(&self) -> KvReport {
        let mut r = KvReport::new();
        r.push("trip_id", &self.trip_id)
            .push("commuter_id", &self.commuter_id)
            .push("windows", self.windows.len())
            .push("rating", self.rating);
        for (f, v) in FeatureKind::ALL.iter().zip(self.impacts) {
            r.push(format!("impact.{f}"), format!("{v:.3}"));
        }
        r.push("queries", self.queries.len());
        for q in &self.queries {
            r.push(format!("query.{}", q.window_index), format!("{:.0}", q.t));
        }
        r
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("window,t,level,p1,p2,p3,p4,p5\n");
        for w in &self.windows {
            let p = w.indicator;
            s.push_str(&format!("{},{},{},{},{},{},{},{}\n", w.window_index, w.t, w.level, p[0], p[1], p[2], p[3], p[4]));
        }
        s
    }
}

/// One predicted window with its true level.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredWindow {
    pub trip_id: String,
    pub indicator: IndicatorVector<f64>,
    pub level: u8,
}

/// Per-class and macro AUC over the windows, then Kendall's W between the
/// predicted and the true trip ratings. The AUCs are absent when every
/// window has the same true level; W is absent when fewer than two trips
/// are scored or every trip gets the same ratings.
pub fn score_windows(windows: &[ScoredWindow]) -> Result<(KvReport, Option<RocResult>, Option<f64>)> {
    let ivs: Vec<IndicatorVector<f64>> = windows.iter().map(|w| w.indicator).collect();
    let levels: Vec<u8> = windows.iter().map(|w| w.level).collect();
    let roc = match multiclass_auc(&ivs, &levels) {
        Ok(r) => Some(r),
        Err(Error::UndefinedAuc(_)) => None,
        Err(e) => return Err(e),
    };
    let mut by_trip: BTreeMap<&str, (Vec<u8>, Vec<u8>)> = BTreeMap::new();
    for w in windows {
        let e = by_trip.entry(w.trip_id.as_str()).or_default();
        e.0.push(w.indicator.level());
        e.1.push(w.level);
    }
    let mut predicted = Vec::new();
    let mut truth = Vec::new();
    for (p, t) in by_trip.values() {
        predicted.push(f64::from(trip_rating(p)?));
        truth.push(f64::from(trip_rating(t)?));
    }
    let w = match kendall_w(&[predicted, truth]) {
        Ok(w) => Some(w),
        Err(Error::InsufficientData(_) | Error::ZeroVariance) => None,
        Err(e) => return Err(e),
    };
    let mut r = KvReport::new();
    r.push("windows", windows.len()).push("trips", by_trip.len());
    match &roc {
        Some(roc) => {
            for (l, a) in &roc.per_class {
                r.push(format!("auc.level{l}"), format!("{a:.6}"));
            }
            if !roc.skipped.is_empty() {
                let s: Vec<String> = roc.skipped.iter().map(u8::to_string).collect();
                r.push("auc.absent_levels", s.join(","));
            }
            r.push("auc.macro", format!("{:.6}", roc.macro_auc));
        }
        None => {
            r.push("auc.macro", "undefined");
        }
    }
    r.push("kendall_w", w.map_or("undefined".to_string(), |w| format!("{w:.6}")));
    Ok((r, roc, w))
}

/// Answers queries from the trips' own labels, as a simulated commuter.
pub fn label_answers<'a>(trips: &'a [TripRecord]) -> impl FnMut(&Query) -> Option<u8> + 'a {
    move |q| trips.iter().find(|t| t.meta.trip_id == q.trip_id).map(|t| t.level_at(q.t))
}

/// Seed for the `i`-th trip of a synthesized batch.
pub fn batch_seed(seed: u64, i: usize) -> u64 {
    use rand::Rng;
    stream(seed, i as u64).random()
}

/// Model inputs in the order used by [`feature_importance`].
pub const IMPORTANCE_INPUTS: [&str; 6] = ["l_speed", "l_jerk", "l_cong", "travel_time", "distance", "zone"];

/// Total-order Sobol indices of the predicted level (argmax, averaged over
/// every head) with each input uniform over the span seen in `fvs`. The zone
/// is drawn from [min, max + 1) and floored.
pub fn feature_importance<T: Scalar>(model: &MtlModel<T>, fvs: &[FeatureVector], n: usize, seed: u64) -> Result<SobolResult> {
    if model.head_count() == 0 {
        return Err(Error::UnregisteredCommuter("<no heads>".into()));
    }
    if fvs.is_empty() {
        return Err(Error::InsufficientData("no feature vectors to span".into()));
    }
    let mut ranges = [(f64::INFINITY, f64::NEG_INFINITY); 6];
    for fv in fvs {
        let x = [fv.l_speed, fv.l_jerk, fv.l_cong, fv.travel_time, fv.distance, f64::from(fv.zone)];
        for (r, v) in ranges.iter_mut().zip(x) {
            r.0 = r.0.min(v);
            r.1 = r.1.max(v);
        }
    }
    ranges[5].1 += 1.0;
    let norm = model.normalization();
    let heads = model.head_count();
    let f = |x: &[f64]| {
        let fv = FeatureVector {
            l_speed: x[0],
            l_jerk: x[1],
            l_cong: x[2],
            travel_time: x[3],
            distance: x[4],
            zone: (x[5].floor().clamp(0.0, 3.0)) as u8,
        };
        let input = norm.input::<T>(&fv);
        (0..heads).map(|h| f64::from(model.forward_input(h, &input).level())).sum::<f64>() / heads as f64
    };
    sobol_total_order(f, &ranges, n, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{render_trip, AnomalyInterval, ScenarioScript};

    #[test]
    fn rating_rounds_half_up() {
        assert_eq!(trip_rating(&[1, 2]).unwrap(), 2);
        assert_eq!(trip_rating(&[1, 1, 2]).unwrap(), 1);
        assert_eq!(trip_rating(&[4, 5]).unwrap(), 5);
        assert_eq!(trip_rating(&[3]).unwrap(), 3);
        assert!(trip_rating(&[]).is_err());
    }

    #[test]
    fn impacts_normalize() {
        let i = impacts(&[[0.2, 0.4, 0.2], [0.2, 0.4, 0.2]]);
        assert!((i[1] - 50.0).abs() < 1e-12);
        assert!((i.iter().sum::<f64>() - 100.0).abs() < 1e-9);
        assert_eq!(impacts(&[[0.0; 3]]), [100.0 / 3.0; 3]);
    }

    #[test]
    fn detector_names_parse() {
        for d in DetectorKind::ALL {
            assert_eq!(d.name().parse::<DetectorKind>().unwrap(), d);
        }
        assert!("lstm".parse::<DetectorKind>().is_err());
    }

    #[test]
    fn short_trip_is_rejected() {
        let script = ScenarioScript { trip_duration: 480.0, ..Default::default() };
        let trip = render_trip(&script, &mut crate::rng::seeded(1)).unwrap();
        let err = detect::<f64>(&trip, &DetectionConfig::default(), 0).unwrap_err();
        assert!(err.to_string().contains("insufficient trip length"), "{err}");
    }

    #[test]
    fn trace_is_deterministic_and_bootstrap_excluded() {
        let mut script = ScenarioScript { trip_duration: 900.0, ..Default::default() };
        script.anomaly_intervals.push(AnomalyInterval { t_start: 650.0, t_end: 800.0, feature: FeatureKind::Jerk, intensity_multiplier: 8.0 });
        let trip = render_trip(&script, &mut crate::rng::seeded(2)).unwrap();
        for det in DetectorKind::ALL {
            let cfg = DetectionConfig { detector: det, ..Default::default() };
            let a = detect::<f64>(&trip, &cfg, 5).unwrap();
            assert_eq!(a, detect::<f64>(&trip, &cfg, 5).unwrap());
            assert_eq!(a.bootstrap, 120);
            assert_eq!(a.feature_vectors().len(), a.observations.len() - 120);
            assert!(a.likelihood.iter().flatten().all(|l| (0.0..=1.0).contains(l)));
        }
    }

    #[test]
    fn perfect_predictor_scores_one() {
        let mut windows = Vec::new();
        for (trip, levels) in [("a", [1u8, 1, 2]), ("b", [3, 3, 4]), ("c", [5, 5, 5]), ("d", [1, 2, 2])] {
            for l in levels {
                let mut p = [0.0; 5];
                p[usize::from(l - 1)] = 1.0;
                windows.push(ScoredWindow { trip_id: trip.into(), indicator: IndicatorVector { p }, level: l });
            }
        }
        let (kv, roc, w) = score_windows(&windows).unwrap();
        assert_eq!(roc.unwrap().macro_auc, 1.0);
        assert!((w.unwrap() - 1.0).abs() < 1e-12);
        let parsed: KvReport = kv.to_string().parse().unwrap();
        assert_eq!(parsed.get_f64("auc.macro"), Some(1.0));
        assert_eq!(parsed.get_f64("kendall_w"), Some(1.0));
    }

    #[test]
    fn single_level_leaves_auc_undefined() {
        let windows: Vec<ScoredWindow> = (0..4)
            .map(|i| ScoredWindow { trip_id: format!("t{}", i % 2), indicator: IndicatorVector::uniform(), level: 1 })
            .collect();
        let (kv, roc, w) = score_windows(&windows).unwrap();
        assert!(roc.is_none() && w.is_none());
        assert_eq!(kv.get("auc.macro"), Some("undefined"));
        assert_eq!(kv.get("kendall_w"), Some("undefined"));
    }

    #[test]
    fn trip_seed_depends_on_id() {
        assert_ne!(trip_seed(1, "a"), trip_seed(1, "b"));
        assert_ne!(trip_seed(1, "a"), trip_seed(2, "a"));
        assert_eq!(trip_seed(1, "a"), trip_seed(1, "a"));
    }

    fn fv(l_jerk: f64, t: f64, zone: u8) -> FeatureVector {
        FeatureVector { l_speed: 0.3 * t / 100.0, l_jerk, l_cong: 0.5, travel_time: t, distance: t / 50.0, zone }
    }

    #[test]
    fn importance_finds_the_only_input_the_model_reads() {
        // one hidden unit copying l_jerk; level 5 wins above 0.5, level 1 below
        let mut m = MtlModel::<f64>::zeros(1);
        m.w1[1] = 1.0;
        m.register("a");
        m.heads[0].w[4] = 10.0;
        m.heads[0].b[0] = 5.0;
        let fvs: Vec<FeatureVector> = (0..=10).map(|i| fv(i as f64 / 10.0, i as f64 * 10.0, (i % 4) as u8)).collect();
        let r = feature_importance(&m, &fvs, 1024, 3).unwrap();
        assert!((r.total[1] - 1.0).abs() < 0.02, "{:?}", r.total);
        for i in [0, 2, 3, 4, 5] {
            assert!(r.total[i].abs() < 1e-12, "{i}: {:?}", r.total);
        }
    }

    #[test]
    fn importance_of_a_constant_model_is_undefined() {
        let mut m = MtlModel::<f64>::zeros(4);
        m.register("a");
        let fvs = [fv(0.1, 10.0, 0), fv(0.9, 90.0, 3)];
        assert!(matches!(feature_importance(&m, &fvs, 256, 0), Err(Error::ZeroVariance)));
        assert!(feature_importance(&MtlModel::<f64>::zeros(4), &fvs, 256, 0).is_err());
    }
}
