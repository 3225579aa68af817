//! Run the configured batch and summarize mean error per variant.

use std::collections::BTreeMap;
use std::path::Path;

use arealoc::config::Config;
use arealoc::replay::{load_map, run_batch, write_batch_csv};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let map = load_map(&root.join("maps/stata_like.osm"))?.0;
    let cfg = Config::load(&root.join("configs/stata.json"))?;
    let spec = cfg.batch.clone().expect("config has a batch section");
    let rows = run_batch(&map, &spec, &cfg)?;

    let mut by_variant: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in &rows {
        if let Some(m) = r.mean {
            by_variant.entry(r.variant.to_string()).or_default().push(m);
        }
    }
    for (v, means) in &by_variant {
        let avg = means.iter().sum::<f64>() / means.len() as f64;
        let worst = means.iter().cloned().fold(0.0, f64::max);
        println!("{v:<9} mean over {} runs {avg:5.2} m (worst run {worst:5.2} m)", means.len());
    }
    if let Some(path) = std::env::args().nth(1) {
        write_batch_csv(&rows, std::fs::File::create(&path)?)?;
        println!("wrote {path}");
    }
    Ok(())
}
