use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use arealoc::config::Config;
use arealoc::replay::{load_map, load_trace, run_batch, run_replay, write_batch_csv, Variant};
use arealoc::synth::{synth_walk, WalkScript};
use arealoc::trace::write_truth;
use arealoc::wifi::{rssi_stats, scenario_samples, SCENARIO_STATS};

#[derive(Parser)]
#[command(name = "arealoc", version, about = "Map- and WiFi-aided pedestrian dead reckoning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one estimator variant over a recorded trace and score it against truth.
    Replay {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        /// Truth CSV; defaults to truth.csv next to the trace.
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long, default_value = "full")]
        variant: Variant,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
    /// Render a scripted walk into trace.jsonl and truth.csv.
    Synth {
        #[arg(long)]
        map: PathBuf,
        /// Walk script JSON; defaults to the config's `script` section.
        #[arg(long)]
        script: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
    /// Synthesize and replay every script x noise x seed x variant in the config's `batch` section.
    Batch {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Overrides the configured seed list (repeatable).
        #[arg(long)]
        seed: Vec<u64>,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
    /// RSSI mean/variance per router in a trace, or of the four scenario generators.
    Stats {
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Samples per scenario when no trace is given.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

type Res<T> = Result<T, Box<dyn std::error::Error>>;

fn load_config(path: Option<&Path>) -> Res<Config> {
    Ok(match path {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    })
}

fn mkdir(dir: &Path) -> Res<()> {
    std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()).into())
}

fn write_file(path: &Path, bytes: &[u8]) -> Res<()> {
    std::fs::write(path, bytes).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn run(cli: Cli) -> Res<()> {
    match cli.command {
        Command::Replay { map, trace, truth, variant, config, out_dir } => {
            let cfg = load_config(config.as_deref())?;
            let truth = truth.unwrap_or_else(|| trace.with_file_name("truth.csv"));
            let (report, est, outputs) = run_replay(&map, &trace, &truth, variant, &cfg, &out_dir)?;
            for w in &est.warnings {
                eprintln!("warning: {w}");
            }
            println!(
                "{variant}: {} points, mean {:.3} m, median {:.3} m, p95 {:.3} m",
                report.errors.len(),
                report.mean,
                report.median,
                report.p95
            );
            println!("wrote {}", outputs.trajectory.display());
        }
        Command::Synth { map, script, config, seed, out_dir } => {
            let cfg = load_config(config.as_deref())?;
            let (map, _) = load_map(&map)?;
            let script: WalkScript = match script {
                Some(p) => {
                    let text = std::fs::read_to_string(&p).map_err(|e| format!("{}: {e}", p.display()))?;
                    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", p.display()))?
                }
                None => cfg.script.clone().ok_or("no --script given and the config has no `script` section")?,
            };
            let out = synth_walk(&map, &script, &cfg.noise, seed)?;
            mkdir(&out_dir)?;
            write_file(&out_dir.join("trace.jsonl"), out.trace.to_jsonl().as_bytes())?;
            let mut truth = Vec::new();
            write_truth(&out.truth, &mut truth)?;
            write_file(&out_dir.join("truth.csv"), &truth)?;
            println!(
                "{} samples, {} scans, {} steps -> {}",
                out.trace.samples.len(),
                out.trace.scans.len(),
                out.truth.len() - 1,
                out_dir.display()
            );
        }
        Command::Batch { map, config, seed, out_dir } => {
            let cfg = load_config(Some(&config))?;
            let (map, _) = load_map(&map)?;
            let mut spec = cfg.batch.clone().ok_or("config has no `batch` section")?;
            if !seed.is_empty() {
                spec.seeds = seed;
            }
            let rows = run_batch(&map, &spec, &cfg)?;
            mkdir(&out_dir)?;
            let mut buf = Vec::new();
            write_batch_csv(&rows, &mut buf)?;
            let path = out_dir.join("batch.csv");
            write_file(&path, &buf)?;
            let failed = rows.iter().filter(|r| r.error.is_some()).count();
            println!("{} rows ({failed} failed) -> {}", rows.len(), path.display());
        }
        Command::Stats { trace, seed, samples, out_dir } => {
            let mut csv = String::from("source,mean_dbm,variance_dbm2,count\n");
            match trace {
                Some(path) => {
                    let trace = load_trace(&path)?;
                    let mut per_router: std::collections::BTreeMap<&str, Vec<f64>> = Default::default();
                    for scan in &trace.scans {
                        for (id, &v) in &scan.readings {
                            per_router.entry(id).or_default().push(v);
                        }
                    }
                    for (id, values) in per_router {
                        let s = rssi_stats(&values)?;
                        csv += &format!("{id},{:.4},{:.4},{}\n", s.mean, s.variance, s.count);
                    }
                }
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    for i in 0..SCENARIO_STATS.len() {
                        let s = rssi_stats(&scenario_samples(i as u8 + 1, samples, &mut rng)?)?;
                        csv += &format!("scenario{},{:.4},{:.4},{}\n", i + 1, s.mean, s.variance, s.count);
                    }
                }
            }
            print!("{csv}");
            if let Some(dir) = out_dir {
                mkdir(&dir)?;
                write_file(&dir.join("stats.csv"), csv.as_bytes())?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
