//! IMU front end: filtering, bias removal, step detection and gyro heading.

mod filter;
mod heading;
mod steps;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use filter::{lowpass, lowpass_primed, remove_bias, Butterworth, FilterConfig};
pub use heading::{estimate_heading, integrate_yaw, HeadingObservation};
pub use steps::{detect_steps, StepConfig, StepEvent};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SignalError {
    #[error("invalid signal configuration: {0}")]
    Config(String),
    #[error("need at least {needed} samples, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("sample timestamps must be strictly increasing (at index {0})")]
    NonMonotonic(usize),
}

/// Raw IMU reading: accel in g, gyro in rad/s, device frame with Z up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorSample {
    pub t: f64,
    pub accel: [f64; 3],
    pub gyro: [f64; 3],
}

impl SensorSample {
    pub fn accel_magnitude(&self) -> f64 {
        let [x, y, z] = self.accel;
        (x * x + y * y + z * z).sqrt()
    }
}

/// Front-end switches used when turning a raw trace into per-step headings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SignalConfig {
    pub steps: StepConfig,
    pub remove_gyro_bias: bool,
    pub filter_gyro: bool,
}

impl Default for SignalConfig {
    fn default() -> Self {
        SignalConfig { steps: StepConfig::default(), remove_gyro_bias: true, filter_gyro: true }
    }
}

/// Output of [`process_imu`].
#[derive(Debug, Clone, PartialEq)]
pub struct ImuSteps {
    pub steps: Vec<StepEvent>,
    pub headings: Vec<HeadingObservation>,
    pub gyro_bias: [f64; 3],
}

/// Bias removal on the gyro, low-pass on gyro z, step detection on the
/// acceleration magnitude and heading integration sampled at each step.
pub fn process_imu(samples: &[SensorSample], cfg: &SignalConfig, initial_theta: f64) -> Result<ImuSteps, SignalError> {
    if let Some(i) = samples.windows(2).position(|w| !(w[1].t > w[0].t)) {
        return Err(SignalError::NonMonotonic(i + 1));
    }
    let mut work = samples.to_vec();
    let mut gyro_bias = [0.0; 3];
    if cfg.remove_gyro_bias {
        let gyro: Vec<[f64; 3]> = samples.iter().map(|s| s.gyro).collect();
        let (debiased, bias) = remove_bias(&gyro, cfg.steps.filter.bias_window)?;
        for (s, g) in work.iter_mut().zip(debiased) {
            s.gyro = g;
        }
        gyro_bias = bias;
    }
    if cfg.filter_gyro && !work.is_empty() {
        let gz: Vec<f64> = work.iter().map(|s| s.gyro[2]).collect();
        for (s, g) in work.iter_mut().zip(lowpass_primed(&gz, &cfg.steps.filter)?) {
            s.gyro[2] = g;
        }
    }
    let steps = detect_steps(&work, &cfg.steps)?;
    let headings = estimate_heading(&work, &steps, initial_theta);
    Ok(ImuSteps { steps, headings, gyro_bias })
}
