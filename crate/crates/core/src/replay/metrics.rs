use serde::{Deserialize, Serialize};

use super::ReplayError;

/// Empirical CDF as (value, fraction <= value) at each distinct sorted value.
pub fn compute_cdf(errors: &[f64]) -> Result<Vec<(f64, f64)>, ReplayError> {
    if errors.is_empty() {
        return Err(ReplayError::NoErrors);
    }
    let mut sorted = errors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, &e) in sorted.iter().enumerate() {
        let frac = (i + 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.0 == e => last.1 = frac,
            _ => out.push((e, frac)),
        }
    }
    Ok(out)
}

/// Nearest-rank percentile of an ascending slice, `p` in (0, 100].
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    let rank = ((p / 100.0) * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    /// (step, error in meters) at every evaluated point.
    pub errors: Vec<(usize, f64)>,
    pub mean: f64,
    pub median: f64,
    pub p95: f64,
    pub cdf: Vec<(f64, f64)>,
}

impl ErrorReport {
    pub fn from_errors(errors: Vec<(usize, f64)>) -> Result<Self, ReplayError> {
        let values: Vec<f64> = errors.iter().map(|e| e.1).collect();
        let cdf = compute_cdf(&values)?;
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let n = sorted.len();
        let median = if n % 2 == 1 { sorted[n / 2] } else { 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]) };
        Ok(ErrorReport { mean, median, p95: percentile(&sorted, 95.0), cdf, errors })
    }

    pub fn max(&self) -> f64 {
        self.errors.iter().map(|e| e.1).fold(0.0, f64::max)
    }
}
