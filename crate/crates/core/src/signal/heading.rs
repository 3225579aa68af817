use serde::{Deserialize, Serialize};

use super::steps::StepEvent;
use super::SensorSample;
use crate::geometry::{wrap_angle, Vec2};

/// Heading observed at one step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeadingObservation {
    pub k: usize,
    pub h_o: Vec2,
    /// atan2 of `h_o`, in (-pi, pi].
    pub theta: f64,
    /// Integrated heading before wrapping, kept for diagnostics.
    pub theta_unwrapped: f64,
}

impl HeadingObservation {
    pub fn from_theta(k: usize, theta_unwrapped: f64) -> Self {
        let h_o = Vec2::from_angle(theta_unwrapped);
        HeadingObservation { k, h_o, theta: wrap_angle(theta_unwrapped), theta_unwrapped }
    }
}

/// Trapezoidal integral of gyro z, one value per sample.
pub fn integrate_yaw(samples: &[SensorSample], initial_theta: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(samples.len());
    let mut theta = initial_theta;
    for (i, s) in samples.iter().enumerate() {
        if i > 0 {
            let prev = &samples[i - 1];
            theta += 0.5 * (prev.gyro[2] + s.gyro[2]) * (s.t - prev.t);
        }
        out.push(theta);
    }
    out
}

/// Integrated heading sampled at each step time (linear between samples,
/// held constant outside the trace).
pub fn estimate_heading(samples: &[SensorSample], steps: &[StepEvent], initial_theta: f64) -> Vec<HeadingObservation> {
    let yaw = integrate_yaw(samples, initial_theta);
    steps
        .iter()
        .map(|st| {
            let theta = sample_at(samples, &yaw, st.t).unwrap_or(initial_theta);
            HeadingObservation::from_theta(st.index, theta)
        })
        .collect()
}

fn sample_at(samples: &[SensorSample], values: &[f64], t: f64) -> Option<f64> {
    let first = samples.first()?;
    if t <= first.t {
        return Some(values[0]);
    }
    let i = samples.partition_point(|s| s.t <= t);
    if i >= samples.len() {
        return values.last().copied();
    }
    let (a, b) = (&samples[i - 1], &samples[i]);
    if a.t == t {
        return Some(values[i - 1]);
    }
    let w = (t - a.t) / (b.t - a.t);
    Some(values[i - 1] + w * (values[i] - values[i - 1]))
}
