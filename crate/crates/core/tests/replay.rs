use std::path::{Path, PathBuf};
use std::process::Command;

use proptest::prelude::*;

use arealoc::config::Config;
use arealoc::replay::{
    compute_cdf, estimate_trajectory, load_map, percentile, run_batch, write_batch_csv, ErrorMode, ErrorReport,
    ReplayError, StartState, Variant,
};
use arealoc::synth::{synth_walk, NoiseProfile};

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

fn stata() -> (arealoc::map::IndoorMap, Config) {
    (load_map(&fixture("maps/stata_like.osm")).unwrap().0, Config::load(&fixture("configs/stata.json")).unwrap())
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_arealoc"))
}

#[test]
fn stata_batch_has_a_row_per_seed_and_variant() {
    let (m, cfg) = stata();
    let spec = cfg.batch.clone().unwrap();
    let rows = run_batch(&m, &spec, &cfg).unwrap();
    assert_eq!(rows.len(), 40);
    assert!(rows.iter().all(|r| r.error.is_none() && r.points > 0));
    let again = run_batch(&m, &spec, &cfg).unwrap();
    assert_eq!(rows, again);
    let (mut a, mut b) = (Vec::new(), Vec::new());
    write_batch_csv(&rows, &mut a).unwrap();
    write_batch_csv(&again, &mut b).unwrap();
    assert_eq!(a, b);
    assert!(String::from_utf8(a)
        .unwrap()
        .starts_with("script,noise,seed,variant,steps,points,mean_m,median_m,p95_m,error\n"));
}

#[test]
fn batch_without_seeds_is_an_error() {
    let (m, cfg) = stata();
    let spec = arealoc::replay::BatchSpec { seeds: vec![], ..cfg.batch.clone().unwrap() };
    assert!(matches!(run_batch(&m, &spec, &cfg), Err(ReplayError::Batch(msg)) if msg == "no seeds"));
}

#[test]
fn every_step_mode_scores_every_truth_row() {
    let (m, mut cfg) = stata();
    let out = synth_walk(&m, cfg.script.as_ref().unwrap(), &NoiseProfile::zero(), 0).unwrap();
    cfg.error_mode = ErrorMode::EveryStep;
    let (_, every) = arealoc::replay::replay_variant(&m, &out.trace, &out.truth, Variant::Area, &cfg).unwrap();
    assert_eq!(every.errors.len() + 1, out.truth.len());
    cfg.error_mode = ErrorMode::Reference;
    let (_, refs) = arealoc::replay::replay_variant(&m, &out.trace, &out.truth, Variant::Area, &cfg).unwrap();
    assert_eq!(refs.errors.len(), out.truth.iter().skip(1).filter(|r| r.reference).count());
}

#[test]
fn imu_variant_is_plain_dead_reckoning() {
    let (m, cfg) = stata();
    let out = synth_walk(&m, cfg.script.as_ref().unwrap(), &NoiseProfile::zero(), 0).unwrap();
    let est = estimate_trajectory(&m, &out.trace, StartState::from(&out.truth[0]), Variant::Imu, &cfg).unwrap();
    assert!(est.engine_stats.is_none());
    for w in est.steps.windows(2) {
        let d = w[0].pos.distance(w[1].pos);
        assert!((d - cfg.engine.step_length).abs() < 1e-12);
        assert!(w[1].area.is_none());
    }
}

#[test]
fn unknown_routers_are_reported() {
    let (m, cfg) = stata();
    let mut out = synth_walk(&m, cfg.script.as_ref().unwrap(), &NoiseProfile::zero(), 0).unwrap();
    out.trace.scans[0].readings.insert("rogue".into(), -50.0);
    let est = estimate_trajectory(&m, &out.trace, StartState::from(&out.truth[0]), Variant::Full, &cfg).unwrap();
    assert_eq!(est.warnings.len(), 1);
    assert!(est.warnings[0].contains("rogue"));
}

#[test]
fn variant_names_round_trip() {
    for v in Variant::ALL {
        assert_eq!(v.as_str().parse::<Variant>().unwrap(), v);
    }
    assert!("both".parse::<Variant>().is_err());
}

#[test]
fn cdf_of_distinct_values_is_uniform() {
    let errors: Vec<f64> = (1..=10).rev().map(|i| i as f64).collect();
    let cdf = compute_cdf(&errors).unwrap();
    assert_eq!(cdf.len(), 10);
    for (i, &(x, p)) in cdf.iter().enumerate() {
        assert_eq!(x, (i + 1) as f64);
        assert!((p - (i + 1) as f64 / 10.0).abs() < 1e-12);
    }
    assert!(matches!(compute_cdf(&[]), Err(ReplayError::NoErrors)));
    // repeated values collapse onto one point
    assert_eq!(compute_cdf(&[2.0, 1.0, 2.0]).unwrap(), vec![(1.0, 1.0 / 3.0), (2.0, 1.0)]);
}

#[test]
fn cli_synth_then_replay_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let map = fixture("maps/rect_loop.osm");
    let cfg = fixture("configs/rect_loop.json");
    let status = cli()
        .args(["synth", "--seed", "3", "--map"])
        .arg(&map)
        .arg("--config")
        .arg(&cfg)
        .arg("--out-dir")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    for variant in ["imu", "full"] {
        let out = cli()
            .args(["replay", "--variant", variant, "--map"])
            .arg(&map)
            .arg("--trace")
            .arg(dir.path().join("trace.jsonl"))
            .arg("--config")
            .arg(&cfg)
            .arg("--out-dir")
            .arg(dir.path())
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        for stem in ["trajectory", "report", "cdf"] {
            assert!(dir.path().join(format!("{stem}_{variant}.csv")).exists());
        }
    }
    let traj = std::fs::read_to_string(dir.path().join("trajectory_full.csv")).unwrap();
    assert!(traj.starts_with("step,x,y,theta,area,flags\n"));
}

#[test]
fn cli_fails_cleanly_on_missing_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli()
        .args(["replay", "--map", "/nonexistent/map.osm", "--trace", "/nonexistent/trace.jsonl", "--out-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("map.osm"));
    let out = cli().args(["replay", "--variant", "gps"]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn cli_stats_reports_the_four_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli().args(["stats", "--samples", "2000", "--out-dir"]).arg(dir.path()).output().unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("stats.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "source,mean_dbm,variance_dbm2,count");
    assert_eq!(lines.len(), 5);
}

proptest! {
    #[test]
    fn report_summaries_match_direct_computation(errors in prop::collection::vec(0.0f64..50.0, 1..200)) {
        let rows: Vec<(usize, f64)> = errors.iter().copied().enumerate().collect();
        let r = ErrorReport::from_errors(rows).unwrap();
        let mean = errors.iter().sum::<f64>() / errors.len() as f64;
        prop_assert!((r.mean - mean).abs() < 1e-9);
        let mut sorted = errors.clone();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let median = if n % 2 == 1 { sorted[n / 2] } else { (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0 };
        prop_assert!((r.median - median).abs() < 1e-12);
        // nearest rank: smallest value with at least 95% of the mass at or below it
        let at_or_below = sorted.iter().filter(|&&e| e <= r.p95).count();
        prop_assert!(at_or_below as f64 >= 0.95 * n as f64);
        prop_assert!(sorted.iter().filter(|&&e| e < r.p95).count() < (0.95 * n as f64).ceil() as usize);
        prop_assert_eq!(percentile(&sorted, 100.0), *sorted.last().unwrap());
        prop_assert_eq!(r.max(), *sorted.last().unwrap());
        let last = r.cdf.last().unwrap();
        prop_assert!((last.1 - 1.0).abs() < 1e-12);
        prop_assert!(r.cdf.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1));
    }
}
