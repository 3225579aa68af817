use super::{SynthError, WalkScript};
use crate::engine::AreaLabel;
use crate::geometry::LocalPoint;
use crate::map::{Direction, IndoorMap};
use crate::trace::TruthRow;

const ON_AXIS_TOL: f64 = 1e-6;

/// True state after one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannedStep {
    pub pos: LocalPoint,
    pub theta: f64,
    pub area: AreaLabel,
    pub leg: usize,
    /// Lands on a scripted waypoint.
    pub reference: bool,
}

/// Step-by-step truth of a script. `rows[0]` is the start.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkPlan {
    pub rows: Vec<PlannedStep>,
    /// Seconds stood still after reaching `rows[k]`.
    pub pause_after: Vec<f64>,
}

impl WalkPlan {
    pub fn step_count(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn truth_rows(&self) -> Vec<TruthRow> {
        self.rows
            .iter()
            .enumerate()
            .map(|(step, r)| TruthRow {
                step,
                x: r.pos.x,
                y: r.pos.y,
                theta: r.theta,
                area: r.area,
                reference: r.reference,
            })
            .collect()
    }
}

/// Area of the motion `a -> b`: a corridor whose axis holds both points, or a
/// room entered, left or crossed without passing through a wall.
pub fn label_motion(map: &IndoorMap, a: LocalPoint, b: LocalPoint) -> Option<AreaLabel> {
    let on_axis = |c: &crate::map::Corridor, p: LocalPoint| {
        let arc = c.arc_of(p);
        c.lateral_of(p).abs() <= ON_AXIS_TOL && arc >= -ON_AXIS_TOL && arc <= c.length + ON_AXIS_TOL
    };
    for c in map.corridors.values() {
        if on_axis(c, a) && on_axis(c, b) {
            let direction = if (b - a).dot(c.bearing_fwd) >= 0.0 { Direction::Fwd } else { Direction::Rev };
            return Some(AreaLabel::Corridor { corridor: c.way_id, direction });
        }
    }
    if map.segment_crosses_wall(a, b).is_none() {
        if let Some(room) = map.rooms.values().find(|r| r.contains(b) || r.contains(a)) {
            return Some(AreaLabel::OpenArea { room: room.id });
        }
    }
    None
}

/// Cut each leg into equal steps (the count rounded from the script's step
/// length) and label every step from map geometry.
pub fn plan_walk(map: &IndoorMap, script: &WalkScript) -> Result<WalkPlan, SynthError> {
    script.validate()?;
    let points: Vec<LocalPoint> = script.waypoints.iter().map(|w| w.resolve(map)).collect::<Result<_, _>>()?;
    let mut rows: Vec<PlannedStep> = Vec::new();
    let mut pause_after = Vec::new();
    for (leg, pair) in points.windows(2).enumerate() {
        let (a, b) = (pair[0], pair[1]);
        let delta = b - a;
        let length = delta.norm();
        let Some(dir) = delta.normalized().filter(|_| length > 1e-9) else {
            return Err(SynthError::Script(format!("leg {leg} has zero length")));
        };
        let n = ((length / script.step_length).round() as usize).max(1);
        let step = length / n as f64;
        let theta = dir.angle();
        let mut prev = a;
        for j in 1..=n {
            let pos = if j == n { b } else { a + dir * (step * j as f64) };
            let area = label_motion(map, prev, pos).ok_or_else(|| SynthError::Disconnected {
                leg,
                reason: format!(
                    "step from ({:.2}, {:.2}) to ({:.2}, {:.2}) follows no corridor and crosses a wall or leaves every room",
                    prev.x, prev.y, pos.x, pos.y
                ),
            })?;
            if rows.is_empty() {
                rows.push(PlannedStep { pos: a, theta, area, leg, reference: true });
                pause_after.push(script.pauses.get(&0).copied().unwrap_or(0.0));
            }
            rows.push(PlannedStep { pos, theta, area, leg, reference: j == n });
            pause_after.push(if j == n { script.pauses.get(&(leg + 1)).copied().unwrap_or(0.0) } else { 0.0 });
            prev = pos;
        }
    }
    Ok(WalkPlan { rows, pause_after })
}
