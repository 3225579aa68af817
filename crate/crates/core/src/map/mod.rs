//! Indoor map model: OSM ingestion, local projection and the geometric
//! queries the estimator relies on.

mod build;
mod error;
mod geo;
mod model;
mod osm;

pub use build::MapBuilder;
pub use error::{MapError, MapWarning};
pub use geo::{project, unproject, GeoPoint, EARTH_RADIUS_M};
pub use model::{
    point_in_ring, Corridor, Direction, DoorLink, Exit, IndoorMap, Location, MapNode, MapWay, NodeId, NodeKind, Room,
    WallHit, WallSegment, WayId, WayKind,
};
pub use osm::{parse_osm, to_osm_xml};

/// Unit bearing of `c` when travelled in `direction`.
pub fn corridor_bearing(c: &Corridor, direction: Direction) -> crate::geometry::Vec2 {
    c.bearing(direction)
}
