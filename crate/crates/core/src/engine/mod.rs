//! Joint positional/area state estimation driven by per-step heading observations.
//!
//! The area type selects the motion rule: corridor steps are pinned to the
//! corridor axis (and recalibrate the heading), open-area steps move freely
//! but cannot cross walls, and a large heading change near a junction starts
//! a windowed maximum-likelihood check of the chosen exit.

mod rules;
mod types;
mod verify;

use thiserror::Error;

pub use rules::{
    area_transition, axis_deviation, choose_exit, corridor_advance, detect_turn, open_area_step, Transition,
    TurnDetection, WALL_CLEARANCE,
};
pub use types::{
    AreaLabel, AreaState, EngineConfig, JointState, Observation, PositionalState, StateFlags, VerificationPhase,
};
pub use verify::{heading_log_likelihood, likelihood_update, verify_turn, Hypothesis, TurnDecision, VerificationState};

use crate::geometry::{signed_angle, wrap_angle, LocalPoint, Vec2};
use crate::map::{Direction, Exit, IndoorMap, Location, NodeId, WayId};

/// Verification rounds after which the current best exit is accepted outright.
const MAX_ROUNDS: u32 = 4;
/// Consecutive unexplained deviations before a turn is placed at the corridor end.
const LAG_STREAK: u32 = 2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("invalid engine configuration: {0}")]
    Config(String),
    #[error("inconsistent initial state: {0}")]
    InitInconsistent(String),
    #[error("observation for step {got} arrived, expected step {expected}")]
    OutOfOrder { expected: usize, got: usize },
    #[error("observation heading must be a finite non-zero vector")]
    BadObservation,
}

/// Counters collected while running.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EngineStats {
    pub turns: usize,
    pub confirms: usize,
    pub switches: usize,
    /// Deviated steps with no junction to explain them.
    pub held: usize,
    pub room_entries: usize,
    pub room_exits: usize,
    pub calibrations: usize,
}

#[derive(Debug, Clone)]
enum Mode {
    Corridor {
        corridor: WayId,
        direction: Direction,
    },
    Verifying {
        v: VerificationState,
        /// History index of the turn step.
        start: usize,
        /// Step lengths since the node, turn step included.
        steps: Vec<f64>,
        round: u32,
    },
    OpenArea {
        room: NodeId,
    },
}

/// Online estimator over a borrowed map.
#[derive(Debug, Clone)]
pub struct Engine<'m> {
    map: &'m IndoorMap,
    cfg: EngineConfig,
    mode: Mode,
    history: Vec<JointState>,
    /// Added to raw observed headings; refreshed on every corridor-aligned step.
    heading_offset: f64,
    held_streak: u32,
    stats: EngineStats,
}

impl<'m> Engine<'m> {
    /// Start at step 0 in `area`. Corridor starts must lie on the axis.
    pub fn new(
        map: &'m IndoorMap,
        cfg: EngineConfig,
        start: PositionalState,
        area: AreaLabel,
    ) -> Result<Self, EngineError> {
        cfg.validate()?;
        if !start.pos.is_finite() || start.h.normalized().is_none() {
            return Err(EngineError::InitInconsistent("start position and heading must be finite".into()));
        }
        let mode = match area {
            AreaLabel::Corridor { corridor, direction } => {
                let c = map
                    .corridor(corridor)
                    .ok_or_else(|| EngineError::InitInconsistent(format!("no corridor {corridor}")))?;
                let arc = c.arc_of(start.pos);
                if c.lateral_of(start.pos).abs() > 1e-6 || arc < -1e-6 || arc > c.length + 1e-6 {
                    return Err(EngineError::InitInconsistent(format!(
                        "start ({:.3}, {:.3}) is not on corridor {corridor}",
                        start.pos.x, start.pos.y
                    )));
                }
                Mode::Corridor { corridor, direction }
            }
            AreaLabel::OpenArea { room } => {
                let r = map.room(room).ok_or_else(|| EngineError::InitInconsistent(format!("no room {room}")))?;
                if !r.contains(start.pos) {
                    return Err(EngineError::InitInconsistent(format!("start is outside room {room}")));
                }
                Mode::OpenArea { room }
            }
            AreaLabel::Intersection { node } => {
                return Err(EngineError::InitInconsistent(format!(
                    "cannot start at intersection {node}; start in an adjacent corridor"
                )))
            }
        };
        let h = start.h.normalized().expect("checked above");
        let first = JointState {
            k: 0,
            positional: PositionalState { pos: start.pos, h, theta: h.angle() },
            area: AreaState::settled(area),
            flags: StateFlags::default(),
        };
        Ok(Engine {
            map,
            cfg,
            mode,
            history: vec![first],
            heading_offset: 0.0,
            held_streak: 0,
            stats: EngineStats::default(),
        })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.cfg
    }

    pub fn current(&self) -> &JointState {
        self.history.last().expect("history is never empty")
    }

    /// Every state so far, indexed by step. Earlier entries can be rewritten
    /// when a turn verification switches corridors.
    pub fn history(&self) -> &[JointState] {
        &self.history
    }

    pub fn into_history(self) -> Vec<JointState> {
        self.history
    }

    pub fn heading_offset(&self) -> f64 {
        self.heading_offset
    }

    pub fn stats(&self) -> EngineStats {
        self.stats
    }

    /// Consume the observation of the next step.
    pub fn step(&mut self, obs: &Observation) -> Result<&JointState, EngineError> {
        let expected = self.current().k + 1;
        if obs.k != expected {
            return Err(EngineError::OutOfOrder { expected, got: obs.k });
        }
        let raw = obs.h_o.normalized().ok_or(EngineError::BadObservation)?;
        if !obs.displacement.is_finite() {
            return Err(EngineError::BadObservation);
        }
        let raw_theta = raw.angle();
        let h = raw.rotated(self.heading_offset);
        let s = obs.displacement.norm();
        let prev = self.current().positional;
        let next = match self.mode.clone() {
            Mode::Corridor { corridor, direction } => {
                self.corridor_step(obs.k, prev, corridor, direction, h, s, raw_theta)
            }
            Mode::Verifying { v, start, steps, round } => {
                self.verifying_step(obs.k, v, start, steps, round, h, s, raw_theta)
            }
            Mode::OpenArea { room } => self.open_area(obs.k, prev, room, h, s, raw_theta),
        };
        self.history.push(next);
        Ok(self.current())
    }

    /// Reset the position to a known fix (a router location). The area is
    /// re-derived from where the fix lies; corridor fixes are projected onto
    /// the corridor axis.
    pub fn calibrate(&mut self, fix: LocalPoint) {
        self.stats.calibrations += 1;
        let h = self.current().positional.h;
        let (pos, mode, label) = match self.map.locate(fix, f64::INFINITY) {
            Some(Location::Room(room)) => (fix, Mode::OpenArea { room }, AreaLabel::OpenArea { room }),
            Some(Location::Corridor { corridor, arc, .. }) => {
                let c = &self.map.corridors[&corridor];
                let direction = if h.dot(c.bearing_fwd) >= 0.0 { Direction::Fwd } else { Direction::Rev };
                (c.point_at(arc), Mode::Corridor { corridor, direction }, AreaLabel::Corridor { corridor, direction })
            }
            None => return,
        };
        self.mode = mode;
        self.held_streak = 0;
        let cur = self.history.last_mut().expect("history is never empty");
        cur.positional.pos = pos;
        cur.area = AreaState::settled(label);
        cur.flags.rssi_calibrated = true;
    }

    fn calibrate_heading(&mut self, bearing: Vec2, raw_theta: f64) {
        self.heading_offset = wrap_angle(bearing.angle() - raw_theta);
    }

    fn state(k: usize, pos: LocalPoint, h: Vec2, label: AreaLabel) -> JointState {
        JointState {
            k,
            positional: PositionalState { pos, h, theta: h.angle() },
            area: AreaState::settled(label),
            flags: StateFlags::default(),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn corridor_step(
        &mut self,
        k: usize,
        prev: PositionalState,
        corridor: WayId,
        direction: Direction,
        h: Vec2,
        s: f64,
        raw_theta: f64,
    ) -> JointState {
        let c = &self.map.corridors[&corridor];
        if axis_deviation(h, c) <= self.cfg.eta_str {
            self.held_streak = 0;
            return self.advance(k, prev, corridor, h, s, raw_theta);
        }
        let found = detect_turn(self.map, prev.pos, h, Some((corridor, direction)), &self.cfg).or_else(|| {
            self.held_streak += 1;
            if self.held_streak >= LAG_STREAK {
                // the walker can only have turned at the end they were heading to
                choose_exit(self.map, c.far_node(direction), h, Some((corridor, direction)), &self.cfg)
            } else {
                None
            }
        });
        match found {
            Some(turn) => {
                self.held_streak = 0;
                self.turn(k, turn, h, s, raw_theta)
            }
            None => {
                self.stats.held += 1;
                Self::state(k, prev.pos, h, AreaLabel::Corridor { corridor, direction })
            }
        }
    }

    fn advance(
        &mut self,
        k: usize,
        prev: PositionalState,
        corridor: WayId,
        h: Vec2,
        s: f64,
        raw_theta: f64,
    ) -> JointState {
        let map = self.map;
        let c = &map.corridors[&corridor];
        let (moved, direction) = corridor_advance(&prev, h, s, c);
        let b = c.bearing(direction);
        self.calibrate_heading(b, raw_theta);
        let arc = c.arc_of(moved.pos);
        if (0.0..=c.length).contains(&arc) {
            self.mode = Mode::Corridor { corridor, direction };
            return Self::state(k, moved.pos, b, AreaLabel::Corridor { corridor, direction });
        }
        let overshoot = if arc > c.length { arc - c.length } else { -arc };
        let node = c.far_node(direction);
        let node_pos = map.nodes[&node].pos;

        let onward = map
            .exits_at(node)
            .into_iter()
            .filter_map(|e| match e {
                Exit::Corridor { corridor: id, direction: d, bearing } if id != corridor => Some((id, d, bearing)),
                _ => None,
            })
            .filter(|(_, _, bearing)| signed_angle(*bearing, b).abs() <= self.cfg.eta_str)
            .max_by(|x, y| b.dot(x.2).total_cmp(&b.dot(y.2)).then(y.0.cmp(&x.0)));
        if let Some((next, d, bearing)) = onward {
            let nc = &map.corridors[&next];
            let along = match d {
                Direction::Fwd => overshoot,
                Direction::Rev => nc.length - overshoot,
            };
            self.calibrate_heading(bearing, raw_theta);
            self.mode = Mode::Corridor { corridor: next, direction: d };
            let mut st =
                Self::state(k, nc.point_at(along), bearing, AreaLabel::Corridor { corridor: next, direction: d });
            st.flags.snapped_turning_point = true;
            return st;
        }
        let label = AreaLabel::Corridor { corridor, direction };
        if let Some(Transition::EnterRoom { room, .. }) = area_transition(map, &label, node_pos, b, s, &self.cfg) {
            self.stats.room_entries += 1;
            self.mode = Mode::OpenArea { room };
            let pos = open_area_step(map, node_pos, b, overshoot);
            return Self::state(k, pos, b, AreaLabel::OpenArea { room });
        }
        self.mode = Mode::Corridor { corridor, direction };
        Self::state(k, node_pos, b, label)
    }

    fn turn(&mut self, k: usize, turn: TurnDetection, h: Vec2, s: f64, raw_theta: f64) -> JointState {
        self.stats.turns += 1;
        let map = self.map;
        let node_pos = map.nodes[&turn.node].pos;
        match turn.choice {
            Exit::Door { room, .. } => {
                self.stats.room_entries += 1;
                self.mode = Mode::OpenArea { room };
                let pos = open_area_step(map, node_pos, h, s);
                let mut st = Self::state(k, pos, h, AreaLabel::OpenArea { room });
                st.flags.snapped_turning_point = true;
                st
            }
            Exit::Corridor { corridor, direction, bearing } => {
                let hypotheses: Vec<Hypothesis> = turn
                    .hypotheses
                    .iter()
                    .filter_map(|e| match *e {
                        Exit::Corridor { corridor, direction, bearing } => {
                            Some(Hypothesis { corridor, direction, bearing })
                        }
                        Exit::Door { .. } => None,
                    })
                    .collect();
                let mut st = Self::state(
                    k,
                    node_pos + bearing * s.min(map.corridors[&corridor].length),
                    h,
                    AreaLabel::Intersection { node: turn.node },
                );
                st.flags.snapped_turning_point = true;
                if hypotheses.len() < 2 {
                    self.stats.confirms += 1;
                    self.calibrate_heading(bearing, raw_theta);
                    self.mode = Mode::Corridor { corridor, direction };
                    st.positional = PositionalState { pos: st.positional.pos, h: bearing, theta: bearing.angle() };
                    return st;
                }
                let mut v = VerificationState::new(turn.node, corridor, hypotheses, self.cfg.k_win);
                v.update(h, self.cfg.sigma_h);
                st.area.verifying = Some(VerificationPhase { candidate: corridor, elapsed: v.elapsed, round: 0 });
                self.mode = Mode::Verifying { v, start: self.history.len(), steps: vec![s], round: 0 };
                if self.cfg.k_win == 1 {
                    // a one-step window is already full
                    return self.resolve(st, raw_theta);
                }
                st
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn verifying_step(
        &mut self,
        k: usize,
        mut v: VerificationState,
        start: usize,
        mut steps: Vec<f64>,
        round: u32,
        h: Vec2,
        s: f64,
        raw_theta: f64,
    ) -> JointState {
        v.update(h, self.cfg.sigma_h);
        steps.push(s);
        let hyp = *v.hypothesis(v.candidate).expect("candidate is a hypothesis");
        let travelled: f64 = steps.iter().sum();
        let length = self.map.corridors[&hyp.corridor].length;
        let node_pos = self.map.nodes[&v.node].pos;
        let mut st = Self::state(
            k,
            node_pos + hyp.bearing * travelled.min(length),
            h,
            AreaLabel::Corridor { corridor: hyp.corridor, direction: hyp.direction },
        );
        st.area.verifying = Some(VerificationPhase { candidate: v.candidate, elapsed: v.elapsed, round });
        self.mode = Mode::Verifying { v, start, steps, round };
        self.resolve(st, raw_theta)
    }

    /// Settle the verification if its window is full or the candidate
    /// corridor has run out; otherwise return `st` unchanged.
    fn resolve(&mut self, mut st: JointState, raw_theta: f64) -> JointState {
        let Mode::Verifying { v, start, steps, round } = self.mode.clone() else {
            return st;
        };
        let map = self.map;
        let node_pos = map.nodes[&v.node].pos;
        let travelled: f64 = steps.iter().sum();
        let reached_end = travelled >= map.corridors[&v.candidate].length;
        if v.elapsed < v.k_win && !reached_end {
            return st;
        }
        let decision = verify::decide(&v);
        let winner = match decision {
            TurnDecision::Switch(next) if round + 1 < MAX_ROUNDS => {
                self.stats.switches += 1;
                let hyp = *v.hypothesis(next).expect("switch target is a hypothesis");
                let length = map.corridors[&next].length;
                let label = AreaLabel::Corridor { corridor: hyp.corridor, direction: hyp.direction };
                let mut cum = 0.0;
                for (i, s) in steps.iter().enumerate() {
                    cum += s;
                    let pos = node_pos + hyp.bearing * cum.min(length);
                    let target = if start + i < self.history.len() { &mut self.history[start + i] } else { &mut st };
                    target.positional.pos = pos;
                    target.flags.compensated = true;
                    if i > 0 {
                        target.area.label = label;
                    }
                }
                let rearmed = v.rearmed(next);
                st.area.verifying = Some(VerificationPhase { candidate: next, elapsed: 0, round: round + 1 });
                st.area.label = label;
                self.mode = Mode::Verifying { v: rearmed, start, steps, round: round + 1 };
                if cum < length {
                    return st;
                }
                // already at the end of the new corridor: accept it
                next
            }
            TurnDecision::Switch(next) => next,
            _ => v.candidate,
        };
        self.stats.confirms += 1;
        let hyp = *v.hypothesis(winner).expect("winner is a hypothesis");
        let length = map.corridors[&winner].length;
        self.calibrate_heading(hyp.bearing, raw_theta);
        self.mode = Mode::Corridor { corridor: hyp.corridor, direction: hyp.direction };
        if winner != v.candidate && !st.flags.compensated {
            st.positional.pos = node_pos + hyp.bearing * travelled.min(length);
        }
        st.positional.h = hyp.bearing;
        st.positional.theta = hyp.bearing.angle();
        st.area = AreaState::settled(AreaLabel::Corridor { corridor: hyp.corridor, direction: hyp.direction });
        st
    }

    fn open_area(
        &mut self,
        k: usize,
        prev: PositionalState,
        room: NodeId,
        h: Vec2,
        s: f64,
        raw_theta: f64,
    ) -> JointState {
        let map = self.map;
        let label = AreaLabel::OpenArea { room };
        let exit = area_transition(map, &label, prev.pos, h, s, &self.cfg).filter(|t| match t {
            Transition::ExitRoom { door, .. } => map.segment_crosses_wall(prev.pos, map.nodes[door].pos).is_none(),
            Transition::EnterRoom { .. } => false,
        });
        if let Some(Transition::ExitRoom { door, corridor, direction, along }) = exit {
            self.stats.room_exits += 1;
            let c = &map.corridors[&corridor];
            let b = c.bearing(direction);
            self.calibrate_heading(b, raw_theta);
            self.mode = Mode::Corridor { corridor, direction };
            let residual = (s - along).max(0.0);
            let door_pos = map.nodes[&door].pos;
            let arc = (c.arc_of(door_pos) + if direction == Direction::Fwd { residual } else { -residual })
                .clamp(0.0, c.length);
            let mut pos = c.point_at(arc);
            if map.segment_crosses_wall(prev.pos, pos).is_some() {
                // the chord would clip the door jamb; stop in the doorway
                pos = door_pos;
            }
            let mut st = Self::state(k, pos, b, AreaLabel::Corridor { corridor, direction });
            st.flags.snapped_turning_point = true;
            return st;
        }
        let pos = open_area_step(map, prev.pos, h, s);
        if map.room(room).is_some_and(|r| !r.contains(pos)) {
            // slipped out through an opening without a door exit
            if let Some(Location::Corridor { corridor, arc, .. }) = map.locate(pos, f64::INFINITY) {
                let c = &map.corridors[&corridor];
                let direction = if h.dot(c.bearing_fwd) >= 0.0 { Direction::Fwd } else { Direction::Rev };
                self.stats.room_exits += 1;
                self.mode = Mode::Corridor { corridor, direction };
                return Self::state(k, c.point_at(arc), h, AreaLabel::Corridor { corridor, direction });
            }
        }
        Self::state(k, pos, h, label)
    }
}

/// Run the engine over a whole observation sequence.
pub fn run_engine(
    map: &IndoorMap,
    cfg: EngineConfig,
    start: PositionalState,
    area: AreaLabel,
    observations: &[Observation],
) -> Result<Vec<JointState>, EngineError> {
    let mut engine = Engine::new(map, cfg, start, area)?;
    for obs in observations {
        engine.step(obs)?;
    }
    Ok(engine.into_history())
}

/// Heading observations for a straight walk at `theta`, steps 1..=n.
pub fn straight_observations(n: usize, theta: f64, step_length: f64) -> Vec<Observation> {
    (1..=n).map(|k| Observation::from_theta(k, theta, step_length)).collect()
}
