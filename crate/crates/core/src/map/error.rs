use thiserror::Error;

use super::model::{NodeId, WayId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("malformed XML at line {line}: {message}")]
    Xml { line: usize, message: String },
    #[error("<{element}> at line {line} is missing attribute `{attr}`")]
    MissingAttribute { element: &'static str, attr: &'static str, line: usize },
    #[error("<{element}> at line {line} has invalid `{attr}` value {value:?}")]
    InvalidAttribute { element: &'static str, attr: &'static str, value: String, line: usize },
    #[error("map contains no nodes")]
    Empty,
    #[error("node {0} has out-of-range or non-building-scale coordinates")]
    InvalidCoordinate(NodeId),
    #[error("duplicate node id {0}")]
    DuplicateNode(NodeId),
    #[error("duplicate way id {0}")]
    DuplicateWay(WayId),
    #[error("way {way} references unknown node {node}")]
    UnknownNodeRef { way: WayId, node: NodeId },
    #[error("way {0} has no indoor tag")]
    UntaggedWay(WayId),
    #[error("way {0} has fewer than two nodes")]
    TooFewNodes(WayId),
    #[error("corridor {0} is degenerate (coincident endpoints)")]
    DegenerateCorridor(WayId),
    #[error("corridor {0} has no turning point or door at either end")]
    CorridorWithoutJunction(WayId),
    #[error("wall {0} contains a zero-length segment")]
    ZeroLengthWall(WayId),
    #[error("door corridor {0} must connect a door to a room or lobby")]
    BadDoorCorridor(WayId),
    #[error("junction node {0} has no incident corridor")]
    IsolatedJunction(NodeId),
    #[error("room {0} is not enclosed by any wall way")]
    RoomWithoutWalls(NodeId),
    #[error("indicator node {0} has no router tag")]
    IndicatorWithoutRouter(NodeId),
    #[error("router {0:?} is assigned to more than one indicator")]
    DuplicateRouter(String),
    #[error("walkable graph is disconnected (node {0} unreachable)")]
    Disconnected(NodeId),
}

/// Non-fatal finding reported alongside a parsed map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapWarning {
    pub line: Option<usize>,
    pub message: String,
}

impl MapWarning {
    pub fn new(line: Option<usize>, message: impl Into<String>) -> Self {
        MapWarning { line, message: message.into() }
    }
}

impl std::fmt::Display for MapWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}
