use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use comfort_core::evaluate::KvReport;
use comfort_core::features::windows;
use comfort_core::fsutil::{atomic_write, read_to_string};
use comfort_core::htm::{is_anomalous, DEFAULT_EPSILON};
use comfort_core::mtl::{mtl_train, retrain, stl_train, train as train_model, FeedbackQueue, MtlModel, TrainReport};
use comfort_core::pipeline::{
    build_dataset, detect_all, feature_importance, label_answers, predict_trip, score_windows, ScoredWindow, TripReport,
    IMPORTANCE_INPUTS,
};
use comfort_core::rng::stream;
use comfort_core::synth::{population, render_trip, ScenarioScript};
use comfort_core::trip::{parse_trip, write_trip, IndicatorVector, TripRecord};

use crate::config::PipelineConfig;

pub const MODEL_FILE: &str = "model.json";

pub fn default_model(cfg: &PipelineConfig) -> PathBuf {
    cfg.paths.models_dir.join(MODEL_FILE)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    atomic_write(path, text.as_bytes())?;
    log::info!("wrote {}", path.display());
    Ok(())
}

/// Trip files named directly, plus every `*.trip` inside named directories
/// in file-name order.
fn trip_paths(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .with_context(|| format!("listing {}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|e| e.extension().is_some_and(|x| x == "trip"))
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn load_trips(inputs: &[PathBuf]) -> Result<Vec<TripRecord>> {
    trip_paths(inputs)?
        .iter()
        .map(|p| parse_trip(p).with_context(|| format!("reading trip {}", p.display())))
        .collect()
}

fn load_model(path: &Path) -> Result<MtlModel<f64>> {
    MtlModel::load(path).with_context(|| format!("loading model {}", path.display()))
}

pub fn synth(cfg: &PipelineConfig, scenario: Option<&Path>, count: usize, use_population: bool, out: &Path) -> Result<()> {
    let scripts = match (scenario, use_population) {
        (Some(path), false) => {
            let base = ScenarioScript::load(path).with_context(|| format!("scenario {}", path.display()))?;
            (0..count)
                .map(|i| {
                    let mut s = base.clone();
                    s.trip_id = format!("{}-{i:04}", base.trip_id);
                    s
                })
                .collect()
        }
        (None, true) => population(&cfg.population, cfg.seed),
        _ => bail!("synth needs exactly one of --scenario or --population"),
    };
    if scripts.is_empty() {
        println!("trips=0");
        return Ok(());
    }
    ensure_dir(out)?;
    for (i, script) in scripts.iter().enumerate() {
        let trip = render_trip(script, &mut stream(cfg.seed, i as u64))?;
        write_trip(&trip, &out.join(format!("{}.trip", trip.meta.trip_id)))?;
    }
    println!("trips={}", scripts.len());
    Ok(())
}

pub fn extract(cfg: &PipelineConfig, inputs: &[PathBuf], out: &Path) -> Result<()> {
    let trips = load_trips(inputs)?;
    ensure_dir(out)?;
    for trip in &trips {
        let mut csv = String::from("window,t_mid,speed,jerk,congestion,travel_time,distance,zone\n");
        for o in windows(trip, &cfg.detection.smoother) {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{},{}",
                o.window_index, o.t_mid, o.v, o.j, o.c, o.travel_time, o.distance, o.zone
            );
        }
        write(&out.join(format!("{}.features.csv", trip.meta.trip_id)), &csv)?;
    }
    println!("trips={}", trips.len());
    Ok(())
}

pub fn detect(cfg: &PipelineConfig, inputs: &[PathBuf], out: &Path) -> Result<()> {
    let trips = load_trips(inputs)?;
    ensure_dir(out)?;
    for (trip, res) in trips.iter().zip(detect_all::<f64>(&trips, &cfg.detection, cfg.seed)) {
        let trace = res.with_context(|| format!("trip {}", trip.meta.trip_id))?;
        let mut kv = KvReport::new();
        kv.push("trip_id", &trace.trip_id)
            .push("detector", trace.detector)
            .push("windows", trace.observations.len())
            .push("bootstrap", trace.bootstrap);
        let post: Vec<&[f64; 3]> = trace.post_bootstrap().map(|(_, l)| l).collect();
        for (i, name) in ["speed", "jerk", "congestion"].iter().enumerate() {
            let mean = post.iter().map(|l| l[i]).sum::<f64>() / post.len() as f64;
            let flagged = post.iter().filter(|l| is_anomalous(l[i], DEFAULT_EPSILON)).count();
            kv.push(format!("mean_likelihood.{name}"), format!("{mean:.6}"));
            kv.push(format!("anomalous.{name}"), flagged);
        }
        write(&out.join(format!("{}.trace.csv", trace.trip_id)), &trace.to_csv())?;
        write(&out.join(format!("{}.detect.txt", trace.trip_id)), &kv.to_string())?;
        print!("{kv}");
    }
    Ok(())
}

fn loss_csv(report: &TrainReport) -> String {
    let mut s = String::from("epoch,train_loss,val_loss\n");
    for (e, (t, v)) in report.train_loss.iter().zip(&report.val_loss).enumerate() {
        let _ = writeln!(s, "{e},{t},{v}");
    }
    s
}

pub fn train(
    cfg: &PipelineConfig,
    data: &Path,
    init: Option<&Path>,
    queue_path: Option<&Path>,
    stl: Option<&str>,
    out: &Path,
) -> Result<()> {
    let trips = load_trips(&[data.to_path_buf()])?;
    if trips.is_empty() {
        bail!("no trips in {}", data.display());
    }
    let (dataset, _) = build_dataset::<f64>(&trips, &cfg.detection, cfg.seed)?;
    let tc = &cfg.train;
    let (mut train_set, val, _) = dataset.split_by_trip(tc.split, tc.seed)?;
    if let Some(c) = stl {
        train_set = train_set.only(c);
        if train_set.is_empty() {
            bail!("no training windows for commuter {c:?}");
        }
    }
    let val = match stl {
        Some(c) => val.only(c),
        None => val,
    };

    let (model, report) = match (init, queue_path) {
        (init, Some(qp)) => {
            let mut model = match init {
                Some(p) => load_model(p)?,
                None => MtlModel::new(cfg.hidden, tc.seed)?,
            };
            let mut queue: FeedbackQueue = serde_json::from_str(&read_to_string(qp)?)
                .with_context(|| format!("parsing queue {}", qp.display()))?;
            let report = match retrain(&mut model, &mut train_set, &mut queue, &val, tc)? {
                Some(r) => r,
                None if init.is_some() => {
                    log::warn!("queue has no answered queries; model unchanged");
                    TrainReport { train_loss: Vec::new(), val_loss: Vec::new() }
                }
                None => train_model(&mut model, &train_set, &val, tc)?,
            };
            write(qp, &serde_json::to_string_pretty(&queue)?)?;
            (model, report)
        }
        (Some(p), None) => {
            let mut model = load_model(p)?;
            let report = train_model(&mut model, &train_set, &val, tc)?;
            (model, report)
        }
        (None, None) => match stl {
            Some(c) => stl_train(c, &train_set, &val, tc, cfg.hidden)?,
            None => mtl_train(&train_set, &val, tc, cfg.hidden)?,
        },
    };

    ensure_dir(out)?;
    let path = out.join(MODEL_FILE);
    model.save(&path)?;
    write(&out.join("train_loss.csv"), &loss_csv(&report))?;
    let mut kv = KvReport::new();
    kv.push("model", path.display())
        .push("heads", model.head_count())
        .push("train_windows", train_set.len())
        .push("val_windows", val.len())
        .push("epochs", report.train_loss.len());
    if let (Some(t), Some(v)) = (report.train_loss.last(), report.val_loss.last()) {
        kv.push("final_train_loss", format!("{t:.6}")).push("final_val_loss", format!("{v:.6}"));
    }
    print!("{kv}");
    Ok(())
}

pub fn run_trip(cfg: &PipelineConfig, trip_path: &Path, model: &Path, queue_path: Option<&Path>, answer: bool, out: &Path) -> Result<()> {
    let trip = parse_trip(trip_path).with_context(|| format!("reading trip {}", trip_path.display()))?;
    let model = load_model(model)?;
    let trace = comfort_core::pipeline::detect::<f64>(&trip, &cfg.detection, cfg.seed)?;
    let mut queue = match queue_path {
        Some(p) if p.exists() => Some(
            serde_json::from_str::<FeedbackQueue>(&read_to_string(p)?)
                .with_context(|| format!("parsing queue {}", p.display()))?,
        ),
        Some(_) => Some(FeedbackQueue::new()),
        None => None,
    };
    let report: TripReport = predict_trip(&model, &trace, cfg.detection.gap_threshold, queue.as_mut())?;
    let mut kv = report.to_kv();
    if let (Some(q), Some(p)) = (queue.as_mut(), queue_path) {
        if answer {
            let trips = [trip.clone()];
            kv.push("answered", q.answer_with(label_answers(&trips)));
        }
        write(p, &serde_json::to_string_pretty(q)?)?;
    }
    ensure_dir(out)?;
    write(&out.join(format!("{}.report.txt", report.trip_id)), &kv.to_string())?;
    write(&out.join(format!("{}.windows.csv", report.trip_id)), &report.to_csv())?;
    print!("{kv}");
    Ok(())
}

/// Predicted and true levels on the test split, then feature importances
/// of the model over the test windows.
pub fn eval(cfg: &PipelineConfig, data: &Path, model_path: Option<&Path>, out: &Path) -> Result<()> {
    let trips = load_trips(&[data.to_path_buf()])?;
    let (dataset, _) = build_dataset::<f64>(&trips, &cfg.detection, cfg.seed)?;
    let (_, _, test) = dataset.split_by_trip(cfg.train.split, cfg.train.seed)?;
    if test.is_empty() {
        bail!("the test split is empty; add more trips per commuter");
    }
    let model = model_path.map(load_model).transpose()?;
    let mut scored = Vec::with_capacity(test.len());
    let mut unseen = BTreeMap::<&str, usize>::new();
    for (c, w) in test.iter() {
        let indicator = match &model {
            Some(m) => {
                if !m.is_registered(c) {
                    *unseen.entry(c).or_default() += 1;
                }
                m.forward_or_average(c, &w.fv)?
            }
            None => {
                let mut p = [0.0; 5];
                p[usize::from(w.level - 1)] = 1.0;
                IndicatorVector { p }
            }
        };
        scored.push(ScoredWindow { trip_id: w.trip_id.clone(), indicator, level: w.level });
    }
    for (c, n) in &unseen {
        log::warn!("commuter {c} has no head; {n} windows scored with the head average");
    }
    let (mut kv, _, _) = score_windows(&scored)?;
    kv.push("split.test_windows", test.len());
    if let Some(m) = &model {
        let fvs: Vec<_> = test.iter().map(|(_, w)| w.fv).collect();
        match feature_importance(m, &fvs, cfg.sobol_samples, cfg.seed) {
            Ok(r) => {
                kv.push("toi.samples", r.base_samples);
                for (i, name) in IMPORTANCE_INPUTS.iter().enumerate() {
                    kv.push(format!("toi.{name}"), format!("{:.6}", r.total[i]));
                    kv.push(format!("toi.{name}.half_width"), format!("{:.6}", r.half_width[i]));
                }
            }
            Err(comfort_core::Error::ZeroVariance) => {
                kv.push("toi", "undefined");
            }
            Err(e) => return Err(e.into()),
        }
    }
    ensure_dir(out)?;
    write(&out.join("eval.txt"), &kv.to_string())?;
    print!("{kv}");
    Ok(())
}

pub fn rate(cfg: &PipelineConfig, inputs: &[PathBuf], model: &Path, out: &Path) -> Result<()> {
    let trips = load_trips(inputs)?;
    let model = load_model(model)?;
    let mut kv = KvReport::new();
    for (trip, res) in trips.iter().zip(detect_all::<f64>(&trips, &cfg.detection, cfg.seed)) {
        let trace = res.with_context(|| format!("trip {}", trip.meta.trip_id))?;
        let report = predict_trip(&model, &trace, cfg.detection.gap_threshold, None)?;
        kv.push(&report.trip_id, report.rating);
    }
    ensure_dir(out)?;
    write(&out.join("ratings.txt"), &kv.to_string())?;
    print!("{kv}");
    Ok(())
}
