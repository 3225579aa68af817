//! Replaying traces through the four estimator variants, scoring them
//! against truth, and running seeded batches.

mod batch;
mod metrics;
mod run;

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use batch::{run_batch, write_batch_csv, BatchRow, BatchSpec};
pub use metrics::{compute_cdf, percentile, ErrorReport};
pub use run::{
    estimate_trajectory, evaluate, replay_variant, ErrorMode, Estimate, EstimatedStep, IndicatorTracker, StartState,
    Variant, VariantSpec,
};

use crate::config::Config;
use crate::engine::EngineError;
use crate::map::{parse_osm, IndoorMap, MapError, MapWarning};
use crate::signal::SignalError;
use crate::trace::{read_truth, Trace, TraceError, TruthRow};

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Map { path: String, source: MapError },
    #[error("{path}: {source}")]
    Trace { path: String, source: TraceError },
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("no error values to summarize")]
    NoErrors,
    #[error("{0}")]
    Batch(String),
}

pub fn load_map(path: &Path) -> Result<(IndoorMap, Vec<MapWarning>), ReplayError> {
    let p = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| ReplayError::Io { path: p.clone(), source })?;
    parse_osm(&text).map_err(|source| ReplayError::Map { path: p, source })
}

pub fn load_trace(path: &Path) -> Result<Trace, ReplayError> {
    let p = path.display().to_string();
    let f = File::open(path).map_err(|source| ReplayError::Io { path: p.clone(), source })?;
    Trace::read(BufReader::new(f)).map_err(|source| ReplayError::Trace { path: p, source })
}

pub fn load_truth(path: &Path) -> Result<Vec<TruthRow>, ReplayError> {
    let p = path.display().to_string();
    let f = File::open(path).map_err(|source| ReplayError::Io { path: p.clone(), source })?;
    read_truth(f).map_err(|source| ReplayError::Trace { path: p, source })
}

fn create(path: &Path) -> Result<File, ReplayError> {
    File::create(path).map_err(|source| ReplayError::Io { path: path.display().to_string(), source })
}

pub fn write_trajectory_csv<W: std::io::Write>(est: &Estimate, w: W) -> Result<(), ReplayError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["step", "x", "y", "theta", "area", "flags"])?;
    for s in &est.steps {
        out.write_record([
            s.step.to_string(),
            format!("{:.6}", s.pos.x),
            format!("{:.6}", s.pos.y),
            format!("{:.6}", s.theta),
            s.area.map(|a| a.to_string()).unwrap_or_default(),
            s.flags.to_string(),
        ])?;
    }
    out.flush().map_err(|source| ReplayError::Io { path: "<trajectory>".into(), source })?;
    Ok(())
}

pub fn write_report_csv<W: std::io::Write>(report: &ErrorReport, w: W) -> Result<(), ReplayError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["step", "error_m"])?;
    for (step, e) in &report.errors {
        out.write_record([step.to_string(), format!("{e:.6}")])?;
    }
    out.flush().map_err(|source| ReplayError::Io { path: "<report>".into(), source })?;
    Ok(())
}

pub fn write_cdf_csv<W: std::io::Write>(report: &ErrorReport, w: W) -> Result<(), ReplayError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["error_m", "fraction"])?;
    for (e, f) in &report.cdf {
        out.write_record([format!("{e:.6}"), format!("{f:.6}")])?;
    }
    out.flush().map_err(|source| ReplayError::Io { path: "<cdf>".into(), source })?;
    Ok(())
}

/// Files written by [`run_replay`].
#[derive(Debug, Clone)]
pub struct ReplayOutputs {
    pub trajectory: PathBuf,
    pub report: PathBuf,
    pub cdf: PathBuf,
}

/// Load map, trace and truth from disk, run `variant`, and write
/// `trajectory_<variant>.csv`, `report_<variant>.csv` and `cdf_<variant>.csv`
/// into `out_dir`.
pub fn run_replay(
    map_path: &Path,
    trace_path: &Path,
    truth_path: &Path,
    variant: Variant,
    cfg: &Config,
    out_dir: &Path,
) -> Result<(ErrorReport, Estimate, ReplayOutputs), ReplayError> {
    let (map, _) = load_map(map_path)?;
    let trace = load_trace(trace_path)?;
    let truth = load_truth(truth_path)?;
    let (est, report) = replay_variant(&map, &trace, &truth, variant, cfg)?;
    std::fs::create_dir_all(out_dir)
        .map_err(|source| ReplayError::Io { path: out_dir.display().to_string(), source })?;
    let outputs = ReplayOutputs {
        trajectory: out_dir.join(format!("trajectory_{variant}.csv")),
        report: out_dir.join(format!("report_{variant}.csv")),
        cdf: out_dir.join(format!("cdf_{variant}.csv")),
    };
    write_trajectory_csv(&est, create(&outputs.trajectory)?)?;
    write_report_csv(&report, create(&outputs.report)?)?;
    write_cdf_csv(&report, create(&outputs.cdf)?)?;
    Ok((report, est, outputs))
}
