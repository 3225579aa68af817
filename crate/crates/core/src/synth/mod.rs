//! Scripted walks over a map, rendered into IMU and RSSI traces with known truth.

mod plan;
mod render;

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use plan::{plan_walk, PlannedStep, WalkPlan};
pub use render::render_trace;

use crate::geometry::LocalPoint;
use crate::map::{IndoorMap, NodeId};
use crate::trace::{Trace, TruthRow};
use crate::wifi::{TwoSlopeModel, WifiError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("invalid walk script: {0}")]
    Script(String),
    #[error("waypoint refers to unknown node {0}")]
    UnknownNode(NodeId),
    #[error("leg {leg} is not connected by map geometry: {reason}")]
    Disconnected { leg: usize, reason: String },
    #[error("invalid noise profile: {0}")]
    Noise(String),
    #[error(transparent)]
    Wifi(#[from] WifiError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Waypoint {
    Node { node: NodeId },
    Point { x: f64, y: f64 },
}

impl Waypoint {
    pub fn resolve(&self, map: &IndoorMap) -> Result<LocalPoint, SynthError> {
        match *self {
            Waypoint::Node { node } => map.node(node).map(|n| n.pos).ok_or(SynthError::UnknownNode(node)),
            Waypoint::Point { x, y } => Ok(LocalPoint::new(x, y)),
        }
    }
}

/// Shape and timing of the synthetic accelerometer signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaitConfig {
    /// Peak deviation of |accel| from 1 g.
    pub amplitude: f64,
    /// Weight of the second harmonic that deepens the trough.
    pub sharpness: f64,
    pub sample_rate_hz: f64,
    /// Standing still before the first step (used for bias estimation).
    pub warmup_s: f64,
    pub rest_s: f64,
    /// Duration of the yaw-rate pulse that renders a turn.
    pub turn_duration_s: f64,
}

impl Default for GaitConfig {
    fn default() -> Self {
        GaitConfig {
            amplitude: 0.08,
            sharpness: 0.3,
            sample_rate_hz: 50.0,
            warmup_s: 2.0,
            rest_s: 1.0,
            turn_duration_s: 0.1,
        }
    }
}

fn default_speed() -> f64 {
    2.0
}
fn default_step_length() -> f64 {
    0.7
}
fn default_scan_rate() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkScript {
    pub waypoints: Vec<Waypoint>,
    /// Cadence in steps per second.
    #[serde(default = "default_speed")]
    pub speed: f64,
    #[serde(default = "default_step_length")]
    pub step_length: f64,
    /// Seconds spent standing at a waypoint, keyed by waypoint index.
    #[serde(default)]
    pub pauses: BTreeMap<usize, f64>,
    #[serde(default)]
    pub gait: GaitConfig,
    #[serde(default = "default_scan_rate")]
    pub scan_rate_hz: f64,
    /// Propagation model for synthetic RSSI; its noise variance is replaced
    /// by the noise profile's scenario.
    #[serde(default)]
    pub radio: TwoSlopeModel,
}

impl WalkScript {
    pub fn new(waypoints: Vec<Waypoint>) -> Self {
        WalkScript {
            waypoints,
            speed: default_speed(),
            step_length: default_step_length(),
            pauses: BTreeMap::new(),
            gait: GaitConfig::default(),
            scan_rate_hz: default_scan_rate(),
            radio: TwoSlopeModel::default(),
        }
    }

    pub fn through_nodes(nodes: &[NodeId]) -> Self {
        Self::new(nodes.iter().map(|&node| Waypoint::Node { node }).collect())
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let positive = [
            ("speed", self.speed),
            ("step_length", self.step_length),
            ("sample_rate_hz", self.gait.sample_rate_hz),
            ("scan_rate_hz", self.scan_rate_hz),
            ("turn_duration_s", self.gait.turn_duration_s),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SynthError::Script(format!("{name} must be positive, got {v}")));
            }
        }
        if self.waypoints.len() < 2 {
            return Err(SynthError::Script("need at least two waypoints".into()));
        }
        if self.gait.warmup_s < 0.0 || self.gait.rest_s < 0.0 || self.pauses.values().any(|p| !(*p >= 0.0)) {
            return Err(SynthError::Script("pauses must be non-negative".into()));
        }
        if let Some(i) = self.pauses.keys().find(|&&i| i >= self.waypoints.len()) {
            return Err(SynthError::Script(format!(
                "pause at waypoint {i}, but there are only {}",
                self.waypoints.len()
            )));
        }
        if !(self.gait.amplitude >= 0.0 && self.gait.sharpness >= 0.0) {
            return Err(SynthError::Script("gait amplitude and sharpness must be non-negative".into()));
        }
        if self.gait.turn_duration_s * self.speed >= 0.5 {
            return Err(SynthError::Script("turn pulse must fit in half a step period".into()));
        }
        self.radio.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseProfile {
    /// Constant yaw-rate offset, rad/s.
    pub gyro_bias: f64,
    pub gyro_noise_sigma: f64,
    /// Per-axis accelerometer noise, g.
    pub accel_noise_sigma: f64,
    /// Spread of the persistent heading error added at every step, radians.
    pub heading_jitter_sigma: f64,
    /// Measured scenario (1..=4) whose variance drives RSSI noise; `None` gives noiseless readings.
    pub rssi_scenario: Option<u8>,
}

impl Default for NoiseProfile {
    fn default() -> Self {
        NoiseProfile {
            gyro_bias: 0.0,
            gyro_noise_sigma: 0.0,
            accel_noise_sigma: 0.0,
            heading_jitter_sigma: 0.0,
            rssi_scenario: None,
        }
    }
}

impl NoiseProfile {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        for (name, v) in [
            ("gyro_noise_sigma", self.gyro_noise_sigma),
            ("accel_noise_sigma", self.accel_noise_sigma),
            ("heading_jitter_sigma", self.heading_jitter_sigma),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(SynthError::Noise(format!("{name} must be >= 0, got {v}")));
            }
        }
        if !self.gyro_bias.is_finite() {
            return Err(SynthError::Noise("gyro_bias must be finite".into()));
        }
        if let Some(s) = self.rssi_scenario {
            crate::wifi::scenario_stats(s)?;
        }
        Ok(())
    }
}

/// A rendered walk: sensor trace plus the truth it was drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthOutput {
    pub trace: Trace,
    pub truth: Vec<TruthRow>,
    /// Time of each step's accelerometer trough; index 0 is step 1.
    pub step_times: Vec<f64>,
}

/// Plan `script` on `map` and render it with `noise`. Deterministic in `seed`.
pub fn synth_walk(
    map: &IndoorMap,
    script: &WalkScript,
    noise: &NoiseProfile,
    seed: u64,
) -> Result<SynthOutput, SynthError> {
    noise.validate()?;
    let plan = plan_walk(map, script)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (trace, step_times) = render_trace(map, script, &plan, noise, &mut rng)?;
    Ok(SynthOutput { trace, truth: plan.truth_rows(), step_times })
}
