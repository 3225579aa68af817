use serde::{Deserialize, Serialize};

use super::filter::{lowpass_primed, FilterConfig};
use super::{SensorSample, SignalError};

/// One detected step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepEvent {
    pub t: f64,
    /// 1-based ordinal.
    pub index: usize,
}

/// Two-threshold drop detector on the filtered acceleration magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StepConfig {
    pub filter: FilterConfig,
    /// Hysteresis half-width around 1 g, in g.
    pub delta_g: f64,
    /// Refractory period between steps, in seconds.
    pub min_interval_s: f64,
}

impl Default for StepConfig {
    fn default() -> Self {
        StepConfig { filter: FilterConfig::default(), delta_g: 0.05, min_interval_s: 0.3 }
    }
}

/// Emit a step each time the low-passed |accel| falls below `1 - delta` after
/// having risen above `1 + delta`, no sooner than `min_interval_s` after the
/// previous step.
pub fn detect_steps(samples: &[SensorSample], cfg: &StepConfig) -> Result<Vec<StepEvent>, SignalError> {
    cfg.filter.validate()?;
    if samples.is_empty() {
        return Ok(Vec::new());
    }
    let mag: Vec<f64> = samples.iter().map(|s| s.accel_magnitude()).collect();
    let filtered = lowpass_primed(&mag, &cfg.filter)?;
    let (hi, lo) = (1.0 + cfg.delta_g, 1.0 - cfg.delta_g);

    let mut steps = Vec::new();
    let mut armed = false;
    let mut last_t = f64::NEG_INFINITY;
    for (s, &m) in samples.iter().zip(&filtered) {
        if m > hi {
            armed = true;
        } else if armed && m < lo && s.t - last_t >= cfg.min_interval_s {
            steps.push(StepEvent { t: s.t, index: steps.len() + 1 });
            last_t = s.t;
            armed = false;
        }
    }
    Ok(steps)
}
