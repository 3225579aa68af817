use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::geo::GeoPoint;
use crate::geometry::{strict_crossing, LocalPoint, Segment, Vec2};

pub type NodeId = i64;
pub type WayId = i64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    TurningPoint,
    Door,
    Room,
    Lobby,
    Indicator {
        router: String,
    },
    /// Untagged geometry vertex (wall corners and the like).
    Vertex,
}

impl NodeKind {
    pub fn tag_value(&self) -> Option<&'static str> {
        match self {
            NodeKind::TurningPoint => Some("turning_point"),
            NodeKind::Door => Some("door"),
            NodeKind::Room => Some("room"),
            NodeKind::Lobby => Some("lobby"),
            NodeKind::Indicator { .. } => Some("indicator"),
            NodeKind::Vertex => None,
        }
    }

    pub fn is_junction(&self) -> bool {
        matches!(self, NodeKind::TurningPoint | NodeKind::Door)
    }

    pub fn is_open_area(&self) -> bool {
        matches!(self, NodeKind::Room | NodeKind::Lobby)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapNode {
    pub id: NodeId,
    pub geo: GeoPoint,
    pub pos: LocalPoint,
    pub kind: NodeKind,
    pub name: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WayKind {
    Corridor,
    Wall,
    DoorCorridor,
    WallCorridor,
}

impl WayKind {
    pub fn tag_value(self) -> &'static str {
        match self {
            WayKind::Corridor => "corridor",
            WayKind::Wall => "wall",
            WayKind::DoorCorridor => "door_corridor",
            WayKind::WallCorridor => "wall_corridor",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapWay {
    pub id: WayId,
    pub node_ids: Vec<NodeId>,
    pub kind: WayKind,
    pub name: Option<String>,
}

/// Travel direction along a corridor relative to its way's node order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Fwd,
    Rev,
}

impl Direction {
    pub fn reversed(self) -> Direction {
        match self {
            Direction::Fwd => Direction::Rev,
            Direction::Rev => Direction::Fwd,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Fwd => "fwd",
            Direction::Rev => "rev",
        }
    }
}

/// A corridor reduced to the straight line between its end nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Corridor {
    pub way_id: WayId,
    /// First and last node of the way.
    pub endpoints: [NodeId; 2],
    pub start: LocalPoint,
    pub end: LocalPoint,
    pub bearing_fwd: Vec2,
    pub length: f64,
}

impl Corridor {
    pub fn bearing(&self, dir: Direction) -> Vec2 {
        match dir {
            Direction::Fwd => self.bearing_fwd,
            Direction::Rev => -self.bearing_fwd,
        }
    }

    /// Node the traveller is heading towards.
    pub fn far_node(&self, dir: Direction) -> NodeId {
        match dir {
            Direction::Fwd => self.endpoints[1],
            Direction::Rev => self.endpoints[0],
        }
    }

    pub fn near_node(&self, dir: Direction) -> NodeId {
        self.far_node(dir.reversed())
    }

    /// Direction of travel leaving `node`, if `node` is an endpoint.
    pub fn direction_from(&self, node: NodeId) -> Option<Direction> {
        if self.endpoints[0] == node {
            Some(Direction::Fwd)
        } else if self.endpoints[1] == node {
            Some(Direction::Rev)
        } else {
            None
        }
    }

    /// Arc length from `start` of the projection of `p` onto the axis (not clamped).
    pub fn arc_of(&self, p: LocalPoint) -> f64 {
        (p - self.start).dot(self.bearing_fwd)
    }

    /// Signed perpendicular distance of `p` from the axis line.
    pub fn lateral_of(&self, p: LocalPoint) -> f64 {
        self.bearing_fwd.cross(p - self.start)
    }

    pub fn point_at(&self, arc: f64) -> LocalPoint {
        if arc >= self.length {
            return self.end;
        }
        if arc <= 0.0 {
            return self.start;
        }
        self.start + self.bearing_fwd * arc
    }

    pub fn axis(&self) -> Segment {
        Segment::new(self.start, self.end)
    }

    pub fn distance_to(&self, p: LocalPoint) -> f64 {
        self.axis().closest_point(p).distance(p)
    }
}

/// Wall piece tagged with the way it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallSegment {
    pub way_id: WayId,
    pub segment: Segment,
}

/// Open area (room or lobby) keyed by its label node.
#[derive(Debug, Clone, PartialEq)]
pub struct Room {
    pub id: NodeId,
    pub label: LocalPoint,
    pub wall_ways: Vec<WayId>,
    /// Implicitly closed rings of the bounding wall ways.
    pub rings: Vec<Vec<LocalPoint>>,
    pub doors: Vec<NodeId>,
}

impl Room {
    pub fn contains(&self, p: LocalPoint) -> bool {
        self.rings.iter().any(|r| point_in_ring(p, r))
    }
}

/// DoorCorridor way tying a door node to a room label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoorLink {
    pub way_id: WayId,
    pub door: NodeId,
    pub room: NodeId,
    /// Unit vector from the door towards the room label.
    pub inward: Vec2,
}

/// Element a traveller can leave a junction node through.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exit {
    Corridor { corridor: WayId, direction: Direction, bearing: Vec2 },
    Door { link: WayId, room: NodeId, bearing: Vec2 },
}

impl Exit {
    pub fn way_id(&self) -> WayId {
        match *self {
            Exit::Corridor { corridor, .. } => corridor,
            Exit::Door { link, .. } => link,
        }
    }

    pub fn bearing(&self) -> Vec2 {
        match *self {
            Exit::Corridor { bearing, .. } | Exit::Door { bearing, .. } => bearing,
        }
    }
}

/// First wall hit along a motion segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallHit {
    pub wall: WallSegment,
    pub point: LocalPoint,
    /// Fraction of the motion segment travelled before the hit.
    pub t: f64,
}

/// Where on the map a point lies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Location {
    Room(NodeId),
    Corridor { corridor: WayId, arc: f64, lateral: f64 },
}

/// Validated, immutable indoor map in a local metric frame.
#[derive(Debug, Clone)]
pub struct IndoorMap {
    pub origin: GeoPoint,
    pub nodes: BTreeMap<NodeId, MapNode>,
    pub ways: BTreeMap<WayId, MapWay>,
    pub corridors: BTreeMap<WayId, Corridor>,
    pub walls: Vec<WallSegment>,
    /// Junction nodes (turning points and doors) with their incident corridors.
    pub turning_points: BTreeMap<NodeId, Vec<WayId>>,
    pub rooms: BTreeMap<NodeId, Room>,
    pub door_links: BTreeMap<WayId, DoorLink>,
    pub indicators: BTreeMap<String, LocalPoint>,
    /// Document order, kept for serialization.
    pub node_order: Vec<NodeId>,
    pub way_order: Vec<WayId>,
}

impl IndoorMap {
    pub fn node(&self, id: NodeId) -> Option<&MapNode> {
        self.nodes.get(&id)
    }

    pub fn corridor(&self, id: WayId) -> Option<&Corridor> {
        self.corridors.get(&id)
    }

    pub fn room(&self, id: NodeId) -> Option<&Room> {
        self.rooms.get(&id)
    }

    /// Closest turning point within `radius`; ties go to the lowest node id.
    pub fn nearest_turning_point(&self, p: LocalPoint, radius: f64) -> Option<&MapNode> {
        self.nearest_node(p, radius, |n| n.kind == NodeKind::TurningPoint)
    }

    /// Closest junction (turning point or door) within `radius`.
    pub fn nearest_junction(&self, p: LocalPoint, radius: f64) -> Option<&MapNode> {
        self.nearest_node(p, radius, |n| n.kind.is_junction())
    }

    pub fn nearest_node<F>(&self, p: LocalPoint, radius: f64, mut filter: F) -> Option<&MapNode>
    where
        F: FnMut(&MapNode) -> bool,
    {
        let mut best: Option<(&MapNode, f64)> = None;
        // BTreeMap iterates in ascending id, so a strict `<` keeps the lowest id on ties.
        for node in self.nodes.values().filter(|n| filter(n)) {
            let d = node.pos.distance(p);
            if d > radius {
                continue;
            }
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((node, d));
            }
        }
        best.map(|(n, _)| n)
    }

    /// First wall strictly crossed by the motion `a -> b`, smallest parameter first.
    pub fn segment_crosses_wall(&self, a: LocalPoint, b: LocalPoint) -> Option<WallHit> {
        let mut best: Option<WallHit> = None;
        for wall in &self.walls {
            if let Some(c) = strict_crossing(a, b, &wall.segment) {
                if best.is_none_or(|h| c.t < h.t) {
                    best = Some(WallHit { wall: *wall, point: c.point, t: c.t });
                }
            }
        }
        best
    }

    /// Ways through which a traveller can leave `node`, sorted by way id.
    pub fn exits_at(&self, node: NodeId) -> Vec<Exit> {
        let mut out = Vec::new();
        if let Some(ids) = self.turning_points.get(&node) {
            for id in ids {
                let c = &self.corridors[id];
                if let Some(direction) = c.direction_from(node) {
                    out.push(Exit::Corridor { corridor: *id, direction, bearing: c.bearing(direction) });
                }
            }
        }
        for link in self.door_links.values().filter(|l| l.door == node) {
            out.push(Exit::Door { link: link.way_id, room: link.room, bearing: link.inward });
        }
        out.sort_by_key(|e| e.way_id());
        out
    }

    pub fn room_containing(&self, p: LocalPoint) -> Option<&Room> {
        self.rooms.values().find(|r| r.contains(p))
    }

    /// Room containing `p`, else the nearest corridor whose axis is within `tolerance`.
    pub fn locate(&self, p: LocalPoint, tolerance: f64) -> Option<Location> {
        if let Some(room) = self.room_containing(p) {
            return Some(Location::Room(room.id));
        }
        let mut best: Option<(WayId, f64)> = None;
        for c in self.corridors.values() {
            let d = c.distance_to(p);
            if d <= tolerance && best.is_none_or(|(_, bd)| d < bd) {
                best = Some((c.way_id, d));
            }
        }
        best.map(|(id, _)| {
            let c = &self.corridors[&id];
            Location::Corridor { corridor: id, arc: c.arc_of(p).clamp(0.0, c.length), lateral: c.lateral_of(p) }
        })
    }

    /// Axis-aligned bounds over all nodes, as (min, max).
    pub fn bounds(&self) -> (LocalPoint, LocalPoint) {
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for n in self.nodes.values() {
            lo.x = lo.x.min(n.pos.x);
            lo.y = lo.y.min(n.pos.y);
            hi.x = hi.x.max(n.pos.x);
            hi.y = hi.y.max(n.pos.y);
        }
        (lo, hi)
    }
}

/// Even-odd ray casting; `ring` is implicitly closed.
pub fn point_in_ring(p: LocalPoint, ring: &[LocalPoint]) -> bool {
    let n = ring.len();
    if n < 3 {
        return false;
    }
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (ring[i], ring[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}
