use std::path::Path;

use arealoc::config::Config;
use arealoc::map::{parse_osm, IndoorMap};
use arealoc::replay::{replay_variant, Variant};
use arealoc::synth::{synth_walk, NoiseProfile, SynthError, WalkScript, Waypoint};
use arealoc::trace::{read_truth, write_truth, Trace, TraceError};

fn load(name: &str) -> IndoorMap {
    let text = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/maps").join(name)).unwrap();
    parse_osm(&text).unwrap().0
}

fn stata_config() -> Config {
    Config::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/configs/stata.json")).unwrap()
}

fn noisy() -> NoiseProfile {
    NoiseProfile {
        gyro_bias: 0.01,
        gyro_noise_sigma: 0.01,
        accel_noise_sigma: 0.01,
        heading_jitter_sigma: 0.02,
        rssi_scenario: Some(3),
    }
}

#[test]
fn same_seed_same_output() {
    let m = load("rect_loop.osm");
    let script = WalkScript::through_nodes(&[1, 2, 3, 4, 1]);
    let a = synth_walk(&m, &script, &noisy(), 11).unwrap();
    let b = synth_walk(&m, &script, &noisy(), 11).unwrap();
    let c = synth_walk(&m, &script, &noisy(), 12).unwrap();
    assert_eq!(a.trace.to_jsonl(), b.trace.to_jsonl());
    assert_eq!(a.truth, b.truth);
    assert_ne!(a.trace.to_jsonl(), c.trace.to_jsonl());
    // truth does not depend on the noise draw
    assert_eq!(a.truth, c.truth);
}

#[test]
fn truth_steps_are_evenly_spaced_per_leg() {
    let m = load("stata_like.osm");
    let script = stata_config().script.unwrap();
    let out = synth_walk(&m, &script, &NoiseProfile::zero(), 0).unwrap();
    for w in out.truth.windows(2) {
        let d = ((w[1].x - w[0].x).powi(2) + (w[1].y - w[0].y).powi(2)).sqrt();
        assert!((d - script.step_length).abs() < 1e-9, "step {}: {d}", w[1].step);
    }
    // waypoints are reference rows, and the walk ends where it started
    let refs = out.truth.iter().filter(|r| r.reference).count();
    assert_eq!(refs, script.waypoints.len());
    let (first, last) = (&out.truth[0], out.truth.last().unwrap());
    assert!((first.x - last.x).abs() < 1e-9 && (first.y - last.y).abs() < 1e-9);
    assert_eq!(out.step_times.len() + 1, out.truth.len());
    assert!(out.step_times.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn legs_through_walls_are_rejected() {
    let m = load("stata_like.osm");
    // straight from the corridor loop into the lobby, through the wall
    let script = WalkScript::new(vec![Waypoint::Node { node: 2 }, Waypoint::Point { x: 40.0, y: 3.0 }]);
    assert!(matches!(synth_walk(&m, &script, &NoiseProfile::zero(), 0), Err(SynthError::Disconnected { leg: 0, .. })));
    let script = WalkScript::through_nodes(&[1, 99]);
    assert_eq!(synth_walk(&m, &script, &NoiseProfile::zero(), 0).unwrap_err(), SynthError::UnknownNode(99));
    let script = WalkScript::through_nodes(&[1]);
    assert!(matches!(synth_walk(&m, &script, &NoiseProfile::zero(), 0), Err(SynthError::Script(_))));
}

#[test]
fn negative_noise_is_rejected() {
    let m = load("rect_loop.osm");
    let noise = NoiseProfile { gyro_noise_sigma: -1.0, ..NoiseProfile::zero() };
    let err = synth_walk(&m, &WalkScript::through_nodes(&[1, 2]), &noise, 0).unwrap_err();
    assert!(matches!(err, SynthError::Noise(_)));
}

#[test]
fn trace_and_truth_survive_a_file_round_trip() {
    let m = load("stata_like.osm");
    let out = synth_walk(&m, &stata_config().script.unwrap(), &noisy(), 3).unwrap();
    let back = Trace::parse(&out.trace.to_jsonl()).unwrap();
    assert_eq!(back.samples.len(), out.trace.samples.len());
    assert_eq!(back.scans.len(), out.trace.scans.len());
    for (a, b) in back.scans.iter().zip(&out.trace.scans) {
        assert_eq!(a, b);
    }
    for (a, b) in back.samples.iter().zip(&out.trace.samples) {
        assert_eq!(a, b);
    }
    let mut csv = Vec::new();
    write_truth(&out.truth, &mut csv).unwrap();
    assert_eq!(read_truth(csv.as_slice()).unwrap(), out.truth);
}

#[test]
fn malformed_trace_lines_are_located() {
    let good = r#"{"t":0.0,"ax":0,"ay":0,"az":1,"gx":0,"gy":0,"gz":0}"#;
    let err = Trace::parse(&format!("{good}\n{{\"t\": oops}}\n")).unwrap_err();
    assert!(matches!(err, TraceError::Parse { line: 2, .. }), "{err:?}");
    let err = Trace::parse(&format!("{good}\n{{\"t\":1.0,\"rssi\":{{\"a\":12.0}}}}\n")).unwrap_err();
    assert!(matches!(err, TraceError::Parse { line: 2, .. }), "{err:?}");
}

#[test]
fn more_heading_jitter_means_more_drift() {
    let m = load("stata_like.osm");
    let cfg = stata_config();
    let script = cfg.script.clone().unwrap();
    let mean_imu_error = |jitter: f64| {
        let noise = NoiseProfile { heading_jitter_sigma: jitter, ..cfg.noise };
        let total: f64 = (0..20u64)
            .map(|seed| {
                let out = synth_walk(&m, &script, &noise, seed).unwrap();
                replay_variant(&m, &out.trace, &out.truth, Variant::Imu, &cfg).unwrap().1.mean
            })
            .sum();
        total / 20.0
    };
    let errors: Vec<f64> = [0.0, 0.01, 0.03, 0.06].iter().map(|&j| mean_imu_error(j)).collect();
    assert!(errors.windows(2).all(|w| w[1] > w[0]), "{errors:?}");
}
