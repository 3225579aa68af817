use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{replay_variant, ReplayError, Variant};
use crate::config::Config;
use crate::map::IndoorMap;
use crate::synth::{synth_walk, NoiseProfile, WalkScript};

fn all_variants() -> Vec<Variant> {
    Variant::ALL.to_vec()
}

/// Cross product of scripts, noise profiles, seeds and variants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSpec {
    pub scripts: BTreeMap<String, WalkScript>,
    pub noise: BTreeMap<String, NoiseProfile>,
    pub seeds: Vec<u64>,
    #[serde(default = "all_variants")]
    pub variants: Vec<Variant>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchRow {
    pub script: String,
    pub noise: String,
    pub seed: u64,
    pub variant: Variant,
    pub steps: usize,
    pub points: usize,
    pub mean: Option<f64>,
    pub median: Option<f64>,
    pub p95: Option<f64>,
    /// Set when this replay failed; the batch carries on.
    pub error: Option<String>,
}

impl BatchRow {
    fn failed(script: &str, noise: &str, seed: u64, variant: Variant, error: String) -> Self {
        BatchRow {
            script: script.to_string(),
            noise: noise.to_string(),
            seed,
            variant,
            steps: 0,
            points: 0,
            mean: None,
            median: None,
            p95: None,
            error: Some(error),
        }
    }
}

fn run_one(map: &IndoorMap, cfg: &Config, spec: &BatchSpec, script: &str, noise: &str, seed: u64) -> Vec<BatchRow> {
    let out = match synth_walk(map, &spec.scripts[script], &spec.noise[noise], seed) {
        Ok(out) => out,
        Err(e) => {
            return spec.variants.iter().map(|&v| BatchRow::failed(script, noise, seed, v, e.to_string())).collect()
        }
    };
    spec.variants
        .iter()
        .map(|&variant| match replay_variant(map, &out.trace, &out.truth, variant, cfg) {
            Ok((est, report)) => BatchRow {
                script: script.to_string(),
                noise: noise.to_string(),
                seed,
                variant,
                steps: est.steps.len() - 1,
                points: report.errors.len(),
                mean: Some(report.mean),
                median: Some(report.median),
                p95: Some(report.p95),
                error: None,
            },
            Err(e) => BatchRow::failed(script, noise, seed, variant, e.to_string()),
        })
        .collect()
}

/// Synthesize and replay every combination, in parallel. Rows come back
/// sorted by (script, noise, seed, variant) whatever the execution order.
pub fn run_batch(map: &IndoorMap, spec: &BatchSpec, cfg: &Config) -> Result<Vec<BatchRow>, ReplayError> {
    if spec.seeds.is_empty() {
        return Err(ReplayError::Batch("no seeds".into()));
    }
    if spec.scripts.is_empty() || spec.noise.is_empty() || spec.variants.is_empty() {
        return Err(ReplayError::Batch("batch needs at least one script, noise profile and variant".into()));
    }
    let jobs: Vec<(&str, &str, u64)> = spec
        .scripts
        .keys()
        .flat_map(|s| {
            spec.noise.keys().flat_map(move |n| spec.seeds.iter().map(move |&seed| (s.as_str(), n.as_str(), seed)))
        })
        .collect();
    let mut rows: Vec<BatchRow> =
        jobs.par_iter().flat_map_iter(|&(s, n, seed)| run_one(map, cfg, spec, s, n, seed)).collect();
    rows.sort_by(|a, b| (&a.script, &a.noise, a.seed, a.variant).cmp(&(&b.script, &b.noise, b.seed, b.variant)));
    Ok(rows)
}

pub fn write_batch_csv<W: Write>(rows: &[BatchRow], w: W) -> Result<(), ReplayError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "script", "noise", "seed", "variant", "steps", "points", "mean_m", "median_m", "p95_m", "error",
    ])?;
    let num = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
    for r in rows {
        out.write_record([
            r.script.clone(),
            r.noise.clone(),
            r.seed.to_string(),
            r.variant.to_string(),
            r.steps.to_string(),
            r.points.to_string(),
            num(r.mean),
            num(r.median),
            num(r.p95),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    out.flush().map_err(|e| ReplayError::Io { path: "<batch output>".into(), source: e })?;
    Ok(())
}
