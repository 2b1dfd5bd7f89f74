//! Line-delimited trip files.
//!
//! ```text
//! #meta trip_id=<s> commuter_id=<s> start_clock=<HH:MM> window=<float> [truth=<windows>]
//! S <t> <accel_y> <lat> <lon> <speed|->   [gyro/magnetometer fields ignored]
//! L <t> <level>
//! A <window_index> <0|1>
//! ```
//!
//! Floats are written with Rust's shortest round-trip `Display`, which never
//! uses exponent notation, so `parse(render(r)) == r` bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use super::{ClockTime, ComfortLabel, SensorSample, TripMeta, TripRecord};
use crate::error::{Error, Result};
use crate::fsutil;

pub fn parse_trip(path: &Path) -> Result<TripRecord> {
    parse_trip_str(&fsutil::read_to_string(path)?)
}

pub fn write_trip(record: &TripRecord, path: &Path) -> Result<()> {
    record.validate()?;
    fsutil::atomic_write(path, render_trip(record).as_bytes())
}

pub fn render_trip(record: &TripRecord) -> String {
    let m = &record.meta;
    let mut out = String::with_capacity(64 + record.samples.len() * 48);
    let _ = writeln!(
        out,
        "#meta trip_id={} commuter_id={} start_clock={} window={}",
        m.trip_id, m.commuter_id, m.start_clock, m.sample_window
    );
    // the count keeps an all-empty truth distinct from no truth at all
    if let Some(truth) = &record.ground_truth_anomaly {
        out.pop();
        let _ = writeln!(out, " truth={}", truth.len());
    }
    for s in &record.samples {
        let _ = write!(out, "S {} {} {} {} ", s.t, s.accel_y, s.lat, s.lon);
        match s.speed {
            Some(v) => {
                let _ = writeln!(out, "{v}");
            }
            None => out.push_str("-\n"),
        }
    }
    for l in &record.labels {
        let _ = writeln!(out, "L {} {}", l.t, l.level);
    }
    if let Some(truth) = &record.ground_truth_anomaly {
        for (i, &flag) in truth.iter().enumerate() {
            let _ = writeln!(out, "A {i} {}", u8::from(flag));
        }
    }
    out
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn float(line: usize, name: &str, tok: Option<&str>) -> Result<f64> {
    let tok = tok.ok_or_else(|| perr(line, format!("missing {name}")))?;
    let v: f64 = tok
        .parse()
        .map_err(|_| perr(line, format!("{name}: {tok:?} is not a number")))?;
    if !v.is_finite() {
        return Err(perr(line, format!("{name}: {tok:?} is not finite")));
    }
    Ok(v)
}

fn parse_meta(line: usize, rest: &str) -> Result<(TripMeta, Option<usize>)> {
    let (mut trip_id, mut commuter_id, mut clock, mut window, mut truth) = (None, None, None, None, None);
    for field in rest.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| perr(line, format!("meta field {field:?} is not key=value")))?;
        match key {
            "trip_id" => trip_id = Some(value.to_owned()),
            "commuter_id" => commuter_id = Some(value.to_owned()),
            "start_clock" => {
                clock = Some(value.parse::<ClockTime>().map_err(|e| perr(line, e.to_string()))?)
            }
            "window" => window = Some(float(line, "window", Some(value))?),
            "truth" => {
                truth = Some(value.parse::<usize>().map_err(|_| perr(line, format!("truth: {value:?} is not a count")))?)
            }
            _ => {}
        }
    }
    let meta = TripMeta {
        trip_id: trip_id.ok_or_else(|| perr(line, "meta missing trip_id"))?,
        commuter_id: commuter_id.ok_or_else(|| perr(line, "meta missing commuter_id"))?,
        start_clock: clock.ok_or_else(|| perr(line, "meta missing start_clock"))?,
        sample_window: window.unwrap_or(TripMeta::DEFAULT_WINDOW_S),
    };
    Ok((meta, truth))
}

pub fn parse_trip_str(text: &str) -> Result<TripRecord> {
    let mut meta = None;
    let mut truth_len = None;
    let mut samples = Vec::new();
    let mut labels = Vec::new();
    let mut anomalies: Vec<(usize, usize, bool)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let raw = raw.trim();
        if raw.is_empty() {
            continue;
        }
        if let Some(rest) = raw.strip_prefix("#meta") {
            if meta.is_some() {
                return Err(perr(line, "duplicate #meta header"));
            }
            let (m, n) = parse_meta(line, rest)?;
            meta = Some(m);
            truth_len = n;
            continue;
        }
        if raw.starts_with('#') {
            continue;
        }
        let mut toks = raw.split_whitespace();
        match toks.next() {
            Some("S") => {
                let t = float(line, "t", toks.next())?;
                let accel_y = float(line, "accel_y", toks.next())?;
                let lat = float(line, "lat", toks.next())?;
                let lon = float(line, "lon", toks.next())?;
                let speed = match toks.next() {
                    None | Some("-") => None,
                    tok => Some(float(line, "speed", tok)?),
                };
                samples.push(SensorSample { t, accel_y, lat, lon, speed });
            }
            Some("L") => {
                let t = float(line, "t", toks.next())?;
                let tok = toks.next().ok_or_else(|| perr(line, "missing level"))?;
                let level = tok
                    .parse::<u8>()
                    .map_err(|_| perr(line, format!("level: {tok:?} is not an integer")))?;
                labels.push(ComfortLabel { t, level });
            }
            Some("A") => {
                let tok = toks.next().ok_or_else(|| perr(line, "missing window index"))?;
                let i = tok
                    .parse::<usize>()
                    .map_err(|_| perr(line, format!("window index: {tok:?} is not an integer")))?;
                let flag = match toks.next() {
                    Some("0") => false,
                    Some("1") => true,
                    other => return Err(perr(line, format!("anomaly flag must be 0 or 1, got {other:?}"))),
                };
                anomalies.push((line, i, flag));
            }
            // other record kinds (raw gyro, magnetometer, ...) are not used
            _ => {}
        }
    }

    let meta = meta.ok_or_else(|| perr(1, "missing #meta header"))?;
    let ground_truth_anomaly = if anomalies.is_empty() && truth_len.is_none() {
        None
    } else {
        let n = truth_len.unwrap_or(anomalies.len());
        if anomalies.len() > n {
            return Err(perr(1, format!("{} anomaly lines for truth={n}", anomalies.len())));
        }
        let mut truth = vec![None; n];
        for (line, i, flag) in anomalies {
            match truth.get_mut(i) {
                Some(slot @ None) => *slot = Some(flag),
                Some(Some(_)) => return Err(perr(line, format!("duplicate anomaly line for window {i}"))),
                None => return Err(perr(line, format!("anomaly window {i} is out of range or leaves a gap"))),
            }
        }
        Some(truth.into_iter().map(|f| f.unwrap_or(false)).collect())
    };

    let record = TripRecord { meta, samples, labels, ground_truth_anomaly };
    record.validate()?;
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const MINIMAL: &str = "#meta trip_id=a commuter_id=b start_clock=07:30 window=5\n\
                           S 0 0.1 12.9 77.6 3\n\
                           S 5 -0.2 12.9001 77.6 3.5\n";

    #[test]
    fn parses_minimal_file() {
        let r = parse_trip_str(MINIMAL).unwrap();
        assert_eq!(r.samples.len(), 2);
        assert_eq!(r.meta.start_clock, ClockTime::new(7, 30).unwrap());
        assert!(r.labels.is_empty());
        assert!(r.ground_truth_anomaly.is_none());
    }

    #[test]
    fn rejects_decreasing_time() {
        let text = "#meta trip_id=a commuter_id=b start_clock=07:30 window=5\n\
                    S 5 0 0 0 1\nS 0 0 0 0 1\n";
        let err = parse_trip_str(text).unwrap_err();
        assert!(err.to_string().contains("t not increasing"), "{err}");
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let text = "#meta trip_id=a commuter_id=b start_clock=07:30 window=5\n\
                    S 0 0 0 0 1\nS 5 zero 0 0 1\n";
        match parse_trip_str(text).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn ignores_unknown_fields_and_records() {
        let text = "#meta trip_id=a commuter_id=b start_clock=07:30 window=5 phone=pixel\n\
                    S 0 0 0 0 1 0.01 0.02 0.03 20 30 40\n\
                    G 0 0.1 0.2 0.3\n\
                    S 1 0 0 0 -\n";
        let r = parse_trip_str(text).unwrap();
        assert_eq!(r.samples.len(), 2);
        assert_eq!(r.samples[1].speed, None);
    }

    #[test]
    fn empty_label_trip_writes_no_label_lines() {
        let r = parse_trip_str(MINIMAL).unwrap();
        let text = render_trip(&r);
        assert!(!text.lines().any(|l| l.starts_with("L ")));
    }

    #[test]
    fn anomaly_gap_is_a_parse_error() {
        let text = format!("{MINIMAL}A 0 1\nA 2 0\n");
        assert!(matches!(parse_trip_str(&text), Err(Error::Parse { .. })));
    }

    #[test]
    fn empty_truth_differs_from_absent_truth() {
        let mut r = parse_trip_str(MINIMAL).unwrap();
        r.ground_truth_anomaly = Some(Vec::new());
        assert_eq!(parse_trip_str(&render_trip(&r)).unwrap(), r);
        // trailing quiet windows need no A lines
        let text = MINIMAL.replacen("window=5", "window=5 truth=3", 1) + "A 0 1\n";
        assert_eq!(parse_trip_str(&text).unwrap().ground_truth_anomaly, Some(vec![true, false, false]));
        let over = MINIMAL.replacen("window=5", "window=5 truth=1", 1) + "A 0 1\nA 1 0\n";
        assert!(parse_trip_str(&over).is_err());
    }

    #[test]
    fn write_is_deterministic_and_parseable() {
        let dir = tempfile::tempdir().unwrap();
        let mut r = parse_trip_str(MINIMAL).unwrap();
        r.labels.push(ComfortLabel { t: 2.5, level: 4 });
        r.ground_truth_anomaly = Some(vec![false, true]);
        let (p1, p2) = (dir.path().join("a.trip"), dir.path().join("b.trip"));
        write_trip(&r, &p1).unwrap();
        write_trip(&r, &p2).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
        assert_eq!(parse_trip(&p1).unwrap(), r);
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let r = parse_trip_str(MINIMAL).unwrap();
        let err = write_trip(&r, Path::new("/nonexistent-dir/x/y.trip")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    fn arb_record() -> impl Strategy<Value = TripRecord> {
        let samples = prop::collection::vec(
            (
                1e-9f64..50.0,
                -20.0f64..20.0,
                -90.0f64..=90.0,
                -180.0f64..=180.0,
                prop::option::of(0.0f64..60.0),
            ),
            0..40,
        )
        .prop_map(|rows| {
            let mut t = 0.0;
            rows.into_iter()
                .map(|(dt, accel_y, lat, lon, speed)| {
                    t += dt;
                    SensorSample { t, accel_y, lat, lon, speed }
                })
                .collect::<Vec<_>>()
        });
        (
            "[a-z0-9_-]{1,12}",
            "[A-Za-z0-9.]{1,12}",
            0u8..24,
            0u8..60,
            0.1f64..30.0,
            samples,
            prop::collection::vec((0.0f64..1.0, 1u8..=5), 0..8),
            prop::option::of(prop::collection::vec(any::<bool>(), 0..30)),
        )
            .prop_map(|(trip, commuter, h, m, window, samples, raw_labels, truth)| {
                let last = samples.last().map_or(0.0, |s| s.t);
                let mut labels: Vec<ComfortLabel> = raw_labels
                    .into_iter()
                    .map(|(f, level)| ComfortLabel { t: f * last, level })
                    .collect();
                labels.sort_by(|a, b| a.t.total_cmp(&b.t));
                TripRecord {
                    meta: TripMeta {
                        trip_id: trip,
                        commuter_id: commuter,
                        start_clock: ClockTime::new(h, m).unwrap(),
                        sample_window: window,
                    },
                    samples,
                    labels,
                    ground_truth_anomaly: truth,
                }
            })
    }

    proptest! {
        #[test]
        fn parse_inverts_render(r in arb_record()) {
            prop_assert!(r.validate().is_ok());
            let back = parse_trip_str(&render_trip(&r)).unwrap();
            // bitwise float comparison through the derived PartialEq plus an
            // explicit bit check on timestamps
            prop_assert_eq!(&back, &r);
            for (a, b) in back.samples.iter().zip(&r.samples) {
                prop_assert_eq!(a.t.to_bits(), b.t.to_bits());
                prop_assert_eq!(a.accel_y.to_bits(), b.accel_y.to_bits());
            }
        }
    }
}
