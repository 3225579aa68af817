//! Synthesize one noisy walk on the Stata-like map and compare all four variants.

use std::path::Path;

use arealoc::config::Config;
use arealoc::replay::{load_map, replay_variant, Variant};
use arealoc::synth::synth_walk;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let map = load_map(&root.join("maps/stata_like.osm"))?.0;
    let cfg = Config::load(&root.join("configs/stata.json"))?;
    let seed = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(0);
    let out = synth_walk(&map, cfg.script.as_ref().expect("config has a script"), &cfg.noise, seed)?;
    println!(
        "seed {seed}: {} steps, {} IMU samples, {} scans",
        out.truth.len() - 1,
        out.trace.samples.len(),
        out.trace.scans.len()
    );
    println!("variant    mean    median  p95     max");
    for v in Variant::ALL {
        let (est, report) = replay_variant(&map, &out.trace, &out.truth, v, &cfg)?;
        println!(
            "{:<9} {:6.2}  {:6.2}  {:6.2}  {:6.2}",
            v.as_str(),
            report.mean,
            report.median,
            report.p95,
            report.max()
        );
        for w in est.warnings {
            println!("  warning: {w}");
        }
        if let Some(s) = est.engine_stats {
            println!(
                "  turns {} (switches {}), room entries {}, calibrations {}",
                s.turns, s.switches, s.room_entries, s.calibrations
            );
        }
    }
    Ok(())
}
