use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::EngineError;
use crate::geometry::{wrap_angle, LocalPoint, Vec2};
use crate::map::{Direction, NodeId, WayId};

/// Position plus unit heading at one step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositionalState {
    pub pos: LocalPoint,
    pub h: Vec2,
    pub theta: f64,
}

impl PositionalState {
    pub fn new(pos: LocalPoint, theta: f64) -> Self {
        PositionalState { pos, h: Vec2::from_angle(theta), theta: wrap_angle(theta) }
    }

    pub fn with_heading(self, h: Vec2) -> Self {
        PositionalState { pos: self.pos, h, theta: h.angle() }
    }

    pub fn with_pos(self, pos: LocalPoint) -> Self {
        PositionalState { pos, ..self }
    }
}

/// Which part of the map governs the motion model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AreaLabel {
    Corridor { corridor: WayId, direction: Direction },
    Intersection { node: NodeId },
    OpenArea { room: NodeId },
}

impl fmt::Display for AreaLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AreaLabel::Corridor { corridor, direction } => write!(f, "corridor:{corridor}:{}", direction.as_str()),
            AreaLabel::Intersection { node } => write!(f, "intersection:{node}"),
            AreaLabel::OpenArea { room } => write!(f, "open_area:{room}"),
        }
    }
}

impl std::str::FromStr for AreaLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let id = |p: &str| p.parse::<i64>().map_err(|_| format!("bad id in area label {s:?}"));
        match parts.as_slice() {
            ["corridor", c, d] => {
                let direction = match *d {
                    "fwd" => Direction::Fwd,
                    "rev" => Direction::Rev,
                    _ => return Err(format!("bad direction in area label {s:?}")),
                };
                Ok(AreaLabel::Corridor { corridor: id(c)?, direction })
            }
            ["intersection", n] => Ok(AreaLabel::Intersection { node: id(n)? }),
            ["open_area", r] => Ok(AreaLabel::OpenArea { room: id(r)? }),
            _ => Err(format!("unrecognized area label {s:?}")),
        }
    }
}

/// Progress of an active turn verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationPhase {
    pub candidate: WayId,
    pub elapsed: usize,
    pub round: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AreaState {
    pub label: AreaLabel,
    pub verifying: Option<VerificationPhase>,
}

impl AreaState {
    pub fn settled(label: AreaLabel) -> Self {
        AreaState { label, verifying: None }
    }
}

/// Provenance markers on a joint state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StateFlags {
    pub snapped_turning_point: bool,
    pub rssi_calibrated: bool,
    pub compensated: bool,
}

impl fmt::Display for StateFlags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = [
            (self.snapped_turning_point, "snapped"),
            (self.rssi_calibrated, "rssi"),
            (self.compensated, "compensated"),
        ]
        .iter()
        .filter(|(on, _)| *on)
        .map(|(_, n)| *n)
        .collect();
        f.write_str(&names.join("|"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointState {
    pub k: usize,
    pub positional: PositionalState,
    pub area: AreaState,
    pub flags: StateFlags,
}

/// Per-step observation: a heading and the displacement of one step along it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub k: usize,
    pub h_o: Vec2,
    pub displacement: Vec2,
}

impl Observation {
    pub fn new(k: usize, h_o: Vec2, step_length: f64) -> Self {
        Observation { k, h_o, displacement: h_o * step_length }
    }

    pub fn from_theta(k: usize, theta: f64, step_length: f64) -> Self {
        Self::new(k, Vec2::from_angle(theta), step_length)
    }
}

/// Thresholds of the map-aided estimator. Angles in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineConfig {
    pub step_length: f64,
    /// Largest heading deviation still treated as walking straight.
    pub eta_str: f64,
    pub turn_snap_radius: f64,
    /// Verification window, in steps.
    pub k_win: usize,
    /// Spread of the Gaussian heading likelihood.
    pub sigma_h: f64,
    /// Reversal beyond which the arrival corridor rejoins the hypothesis set.
    pub uturn_threshold: f64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            step_length: 0.7,
            eta_str: 30f64.to_radians(),
            turn_snap_radius: 3.0,
            k_win: 5,
            sigma_h: 15f64.to_radians(),
            uturn_threshold: 150f64.to_radians(),
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        let positive = [
            ("step_length", self.step_length),
            ("eta_str", self.eta_str),
            ("turn_snap_radius", self.turn_snap_radius),
            ("sigma_h", self.sigma_h),
            ("uturn_threshold", self.uturn_threshold),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(EngineError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.eta_str >= PI / 2.0 {
            return Err(EngineError::Config("eta_str must be below pi/2".into()));
        }
        if self.k_win == 0 {
            return Err(EngineError::Config("k_win must be at least 1".into()));
        }
        Ok(())
    }
}
