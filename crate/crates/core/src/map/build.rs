use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::error::{MapError, MapWarning};
use super::geo::{project, unproject, GeoPoint};
use super::model::{
    Corridor, DoorLink, IndoorMap, MapNode, MapWay, NodeId, NodeKind, Room, WallSegment, WayId, WayKind,
};
use crate::geometry::{LocalPoint, Segment};

/// Largest |lat - origin.lat| accepted by the local projection, in degrees.
const MAX_LAT_SPAN_DEG: f64 = 1.0;

enum Position {
    Geo(GeoPoint),
    Local(LocalPoint),
}

struct PendingNode {
    id: NodeId,
    pos: Position,
    kind: NodeKind,
    name: Option<String>,
}

/// Assembles nodes and ways, then validates them into an [`IndoorMap`].
///
/// Nodes can be given in WGS84 (as the OSM parser does) or directly in local
/// meters, which is handy for tests and synthetic layouts.
pub struct MapBuilder {
    origin: Option<GeoPoint>,
    nodes: Vec<PendingNode>,
    ways: Vec<MapWay>,
}

impl Default for MapBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl MapBuilder {
    pub fn new() -> Self {
        MapBuilder { origin: None, nodes: Vec::new(), ways: Vec::new() }
    }

    /// Anchor used to assign lat/lon to locally specified nodes. Defaults to
    /// the first geo node, or (0, 0) when every node is local.
    pub fn origin(mut self, origin: GeoPoint) -> Self {
        self.origin = Some(origin);
        self
    }

    pub fn geo_node(mut self, id: NodeId, at: GeoPoint, kind: NodeKind) -> Self {
        self.push_geo_node(id, at, kind, None);
        self
    }

    pub fn node(mut self, id: NodeId, x: f64, y: f64, kind: NodeKind) -> Self {
        self.nodes.push(PendingNode { id, pos: Position::Local(LocalPoint::new(x, y)), kind, name: None });
        self
    }

    pub fn way(mut self, id: WayId, kind: WayKind, node_ids: &[NodeId]) -> Self {
        self.push_way(MapWay { id, node_ids: node_ids.to_vec(), kind, name: None });
        self
    }

    pub(crate) fn push_geo_node(&mut self, id: NodeId, at: GeoPoint, kind: NodeKind, name: Option<String>) {
        self.nodes.push(PendingNode { id, pos: Position::Geo(at), kind, name });
    }

    pub(crate) fn push_way(&mut self, way: MapWay) {
        self.ways.push(way);
    }

    pub fn build(self) -> Result<IndoorMap, MapError> {
        self.build_with_warnings(Vec::new()).map(|(m, _)| m)
    }

    pub(crate) fn build_with_warnings(
        self,
        mut warnings: Vec<MapWarning>,
    ) -> Result<(IndoorMap, Vec<MapWarning>), MapError> {
        if self.nodes.is_empty() {
            return Err(MapError::Empty);
        }
        let origin = self.origin.unwrap_or_else(|| {
            self.nodes
                .iter()
                .find_map(|n| match n.pos {
                    Position::Geo(g) => Some(g),
                    Position::Local(_) => None,
                })
                .unwrap_or(GeoPoint::new(0.0, 0.0))
        });

        let mut nodes = BTreeMap::new();
        let mut node_order = Vec::with_capacity(self.nodes.len());
        for n in self.nodes {
            let (geo, pos) = match n.pos {
                Position::Geo(g) => {
                    if !g.is_valid() || (g.lat - origin.lat).abs() >= MAX_LAT_SPAN_DEG {
                        return Err(MapError::InvalidCoordinate(n.id));
                    }
                    (g, project(origin, g))
                }
                Position::Local(p) => {
                    if !p.is_finite() {
                        return Err(MapError::InvalidCoordinate(n.id));
                    }
                    (unproject(origin, p), p)
                }
            };
            if nodes.contains_key(&n.id) {
                return Err(MapError::DuplicateNode(n.id));
            }
            node_order.push(n.id);
            nodes.insert(n.id, MapNode { id: n.id, geo, pos, kind: n.kind, name: n.name });
        }

        let mut ways = BTreeMap::new();
        let mut way_order = Vec::with_capacity(self.ways.len());
        for w in self.ways {
            if ways.contains_key(&w.id) {
                return Err(MapError::DuplicateWay(w.id));
            }
            if w.node_ids.len() < 2 {
                return Err(MapError::TooFewNodes(w.id));
            }
            if let Some(missing) = w.node_ids.iter().find(|id| !nodes.contains_key(id)) {
                return Err(MapError::UnknownNodeRef { way: w.id, node: *missing });
            }
            way_order.push(w.id);
            ways.insert(w.id, w);
        }

        let mut indicators = BTreeMap::new();
        for n in nodes.values() {
            if let NodeKind::Indicator { router } = &n.kind {
                if router.is_empty() {
                    return Err(MapError::IndicatorWithoutRouter(n.id));
                }
                if indicators.insert(router.clone(), n.pos).is_some() {
                    return Err(MapError::DuplicateRouter(router.clone()));
                }
            }
        }

        let mut corridors = BTreeMap::new();
        let mut turning_points: BTreeMap<NodeId, Vec<WayId>> =
            nodes.values().filter(|n| n.kind.is_junction()).map(|n| (n.id, Vec::new())).collect();
        let mut walls = Vec::new();
        let mut door_links = BTreeMap::new();

        for w in ways.values() {
            match w.kind {
                WayKind::Corridor => {
                    let first = w.node_ids[0];
                    let last = *w.node_ids.last().unwrap();
                    let (a, b) = (&nodes[&first], &nodes[&last]);
                    if !a.kind.is_junction() && !b.kind.is_junction() {
                        return Err(MapError::CorridorWithoutJunction(w.id));
                    }
                    let length = a.pos.distance(b.pos);
                    let bearing_fwd = match (b.pos - a.pos).normalized() {
                        Some(v) if first != last && length > 0.0 => v,
                        _ => return Err(MapError::DegenerateCorridor(w.id)),
                    };
                    for end in [first, last] {
                        if let Some(list) = turning_points.get_mut(&end) {
                            list.push(w.id);
                        }
                    }
                    corridors.insert(
                        w.id,
                        Corridor {
                            way_id: w.id,
                            endpoints: [first, last],
                            start: a.pos,
                            end: b.pos,
                            bearing_fwd,
                            length,
                        },
                    );
                }
                WayKind::Wall => {
                    for pair in w.node_ids.windows(2) {
                        let seg = Segment::new(nodes[&pair[0]].pos, nodes[&pair[1]].pos);
                        if !(seg.length() > 0.0) {
                            return Err(MapError::ZeroLengthWall(w.id));
                        }
                        walls.push(WallSegment { way_id: w.id, segment: seg });
                    }
                }
                WayKind::DoorCorridor => {
                    let first = &nodes[&w.node_ids[0]];
                    let last = &nodes[w.node_ids.last().unwrap()];
                    let (door, room) = match (&first.kind, &last.kind) {
                        (NodeKind::Door, k) if k.is_open_area() => (first, last),
                        (k, NodeKind::Door) if k.is_open_area() => (last, first),
                        _ => return Err(MapError::BadDoorCorridor(w.id)),
                    };
                    let inward = (room.pos - door.pos).normalized().ok_or(MapError::BadDoorCorridor(w.id))?;
                    door_links.insert(w.id, DoorLink { way_id: w.id, door: door.id, room: room.id, inward });
                }
                // Parsed and validated for shape only; nothing consumes it.
                WayKind::WallCorridor => {}
            }
        }

        for (id, incident) in &turning_points {
            let is_door = nodes[id].kind == NodeKind::Door;
            let linked = door_links.values().any(|l| l.door == *id);
            if incident.is_empty() && !(is_door && linked) {
                return Err(MapError::IsolatedJunction(*id));
            }
        }

        let mut rooms = BTreeMap::new();
        for n in nodes.values().filter(|n| n.kind.is_open_area()) {
            let mut wall_ways = Vec::new();
            let mut rings = Vec::new();
            for w in ways.values().filter(|w| w.kind == WayKind::Wall) {
                let ring: Vec<LocalPoint> = ring_points(w, &nodes);
                if super::model::point_in_ring(n.pos, &ring) {
                    wall_ways.push(w.id);
                    rings.push(ring);
                }
            }
            if wall_ways.is_empty() {
                return Err(MapError::RoomWithoutWalls(n.id));
            }
            let doors = door_links.values().filter(|l| l.room == n.id).map(|l| l.door).collect();
            rooms.insert(n.id, Room { id: n.id, label: n.pos, wall_ways, rings, doors });
        }

        check_connected(&corridors, &door_links)?;

        if corridors.is_empty() && rooms.is_empty() {
            warnings.push(MapWarning::new(None, "map has neither corridors nor rooms"));
        }

        Ok((
            IndoorMap {
                origin,
                nodes,
                ways,
                corridors,
                walls,
                turning_points,
                rooms,
                door_links,
                indicators,
                node_order,
                way_order,
            },
            warnings,
        ))
    }
}

fn ring_points(w: &MapWay, nodes: &BTreeMap<NodeId, MapNode>) -> Vec<LocalPoint> {
    let mut ids: &[NodeId] = &w.node_ids;
    if ids.len() > 1 && ids.first() == ids.last() {
        ids = &ids[..ids.len() - 1];
    }
    ids.iter().map(|id| nodes[id].pos).collect()
}

/// Walkable graph over Corridor and DoorCorridor ways must be a single component.
fn check_connected(
    corridors: &BTreeMap<WayId, Corridor>,
    door_links: &BTreeMap<WayId, DoorLink>,
) -> Result<(), MapError> {
    let mut adj: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
    let mut link = |a: NodeId, b: NodeId| {
        adj.entry(a).or_default().insert(b);
        adj.entry(b).or_default().insert(a);
    };
    for c in corridors.values() {
        link(c.endpoints[0], c.endpoints[1]);
    }
    for l in door_links.values() {
        link(l.door, l.room);
    }
    let Some(&start) = adj.keys().next() else {
        return Ok(());
    };
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(n) = queue.pop_front() {
        for &m in &adj[&n] {
            if seen.insert(m) {
                queue.push_back(m);
            }
        }
    }
    if let Some(&unreached) = adj.keys().find(|k| !seen.contains(k)) {
        return Err(MapError::Disconnected(unreached));
    }
    Ok(())
}
