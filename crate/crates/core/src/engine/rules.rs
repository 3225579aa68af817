//! Per-step motion rules, one for each area type, plus the door transition test.

use std::f64::consts::FRAC_PI_2;

use super::types::{AreaLabel, EngineConfig, PositionalState};
use crate::geometry::{signed_angle, LocalPoint, Vec2};
use crate::map::{Corridor, Direction, Exit, IndoorMap, NodeId, NodeKind, WayId};

/// Distance kept from a wall after a contact, on the side the motion came from.
pub const WALL_CLEARANCE: f64 = 1e-6;
const MAX_SLIDES: usize = 8;

/// Move one step of length `s` along the corridor axis. The travel direction
/// follows the sign of the heading projected on the axis; the lateral offset
/// is dropped. The result may lie past either end of the corridor.
pub fn corridor_advance(state: &PositionalState, h: Vec2, s: f64, corridor: &Corridor) -> (PositionalState, Direction) {
    let direction = if h.dot(corridor.bearing_fwd) >= 0.0 { Direction::Fwd } else { Direction::Rev };
    let signed = match direction {
        Direction::Fwd => s,
        Direction::Rev => -s,
    };
    let arc = corridor.arc_of(state.pos) + signed;
    let b = corridor.bearing(direction);
    (PositionalState { pos: corridor.start + corridor.bearing_fwd * arc, h: b, theta: b.angle() }, direction)
}

/// Angle between `h` and the corridor axis, ignoring travel direction.
pub fn axis_deviation(h: Vec2, corridor: &Corridor) -> f64 {
    let d = signed_angle(corridor.bearing_fwd, h).abs();
    d.min(std::f64::consts::PI - d)
}

/// Free motion inside an open area. On a wall contact the walker stops just
/// short of the wall and the rest of the step slides along it.
pub fn open_area_step(map: &IndoorMap, from: LocalPoint, h: Vec2, s: f64) -> LocalPoint {
    let mut pos = from;
    let mut dir = h;
    let mut remaining = s;
    for _ in 0..MAX_SLIDES {
        if remaining <= 0.0 {
            return pos;
        }
        let target = pos + dir * remaining;
        let Some(hit) = map.segment_crosses_wall(pos, target) else {
            return target;
        };
        let Some(tangent) = hit.wall.segment.direction() else {
            return pos;
        };
        let mut normal = Vec2::new(-tangent.y, tangent.x);
        if normal.dot(pos - hit.point) < 0.0 {
            normal = -normal;
        }
        let contact = hit.point + normal * WALL_CLEARANCE;
        if map.segment_crosses_wall(pos, contact).is_some() {
            // contact right at a corner; stay put rather than risk crossing
            return pos;
        }
        remaining -= remaining * hit.t;
        pos = contact;
        let along = dir.dot(tangent);
        if along.abs() < 1e-12 {
            return pos;
        }
        dir = if along > 0.0 { tangent } else { -tangent };
    }
    pos
}

/// Outcome of the first turn check at a junction.
#[derive(Debug, Clone, PartialEq)]
pub struct TurnDetection {
    pub node: NodeId,
    pub choice: Exit,
    /// Every exit still considered, sorted by way id.
    pub hypotheses: Vec<Exit>,
}

/// Pick the exit at `node` best aligned with `h`. The way back along the
/// arrival corridor is only considered for near reversals.
pub fn choose_exit(
    map: &IndoorMap,
    node: NodeId,
    h: Vec2,
    arrival: Option<(WayId, Direction)>,
    cfg: &EngineConfig,
) -> Option<TurnDetection> {
    let hypotheses: Vec<Exit> = map
        .exits_at(node)
        .into_iter()
        .filter(|e| match (e, arrival) {
            (Exit::Corridor { corridor, direction, .. }, Some((ac, adir)))
                if *corridor == ac && *direction == adir.reversed() =>
            {
                let travel = map.corridors[&ac].bearing(adir);
                signed_angle(travel, h).abs() > cfg.uturn_threshold
            }
            _ => true,
        })
        .collect();
    let mut best: Option<(Exit, f64)> = None;
    for e in &hypotheses {
        let score = h.dot(e.bearing());
        if best.is_none_or(|(_, b)| score > b) {
            best = Some((*e, score));
        }
    }
    best.map(|(choice, _)| TurnDetection { node, choice, hypotheses })
}

/// First turn check: snap to the nearest junction within the snap radius and
/// choose the exit with the largest heading agreement.
pub fn detect_turn(
    map: &IndoorMap,
    pos: LocalPoint,
    h: Vec2,
    arrival: Option<(WayId, Direction)>,
    cfg: &EngineConfig,
) -> Option<TurnDetection> {
    let node = map.nearest_junction(pos, cfg.turn_snap_radius)?;
    choose_exit(map, node.id, h, arrival, cfg)
}

/// Area change triggered at a door.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transition {
    EnterRoom {
        door: NodeId,
        link: WayId,
        room: NodeId,
    },
    /// `along` is how far the step had to go to reach the door.
    ExitRoom {
        door: NodeId,
        corridor: WayId,
        direction: Direction,
        along: f64,
    },
}

/// Door crossing test for a step of length `s` taken with heading `h`.
pub fn area_transition(
    map: &IndoorMap,
    label: &AreaLabel,
    pos: LocalPoint,
    h: Vec2,
    s: f64,
    cfg: &EngineConfig,
) -> Option<Transition> {
    match *label {
        AreaLabel::Corridor { .. } | AreaLabel::Intersection { .. } => {
            let door = map.nearest_node(pos, cfg.turn_snap_radius, |n| n.kind == NodeKind::Door)?;
            let limit = (2.0 * cfg.eta_str).min(FRAC_PI_2 - 1e-9);
            map.door_links
                .values()
                .filter(|l| l.door == door.id && signed_angle(l.inward, h).abs() <= limit)
                .min_by(|a, b| {
                    let da = signed_angle(a.inward, h).abs();
                    let db = signed_angle(b.inward, h).abs();
                    da.total_cmp(&db).then(a.way_id.cmp(&b.way_id))
                })
                .map(|l| Transition::EnterRoom { door: l.door, link: l.way_id, room: l.room })
        }
        AreaLabel::OpenArea { room } => {
            let room = map.room(room)?;
            let mut best: Option<(Transition, f64)> = None;
            for &door in &room.doors {
                let d = map.nodes[&door].pos - pos;
                let along = d.dot(h);
                let cross = h.cross(d).abs();
                if along < -0.5 * s || along > s + 1e-6 || cross > cfg.turn_snap_radius {
                    continue;
                }
                let outward = map.exits_at(door).into_iter().find_map(|e| match e {
                    Exit::Corridor { corridor, direction, bearing }
                        if signed_angle(bearing, h).abs() <= cfg.eta_str =>
                    {
                        Some((corridor, direction))
                    }
                    _ => None,
                });
                if let Some((corridor, direction)) = outward {
                    let dist = d.norm();
                    if best.is_none_or(|(_, bd)| dist < bd) {
                        best = Some((Transition::ExitRoom { door, corridor, direction, along: along.max(0.0) }, dist));
                    }
                }
            }
            best.map(|(t, _)| t)
        }
    }
}
