use serde::{Deserialize, Serialize};

use crate::geometry::LocalPoint;

/// Mean Earth radius used by the local tangent-plane projection.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// WGS84 coordinate in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Self {
        GeoPoint { lat, lon }
    }

    pub fn is_valid(&self) -> bool {
        self.lat.is_finite()
            && self.lon.is_finite()
            && (-90.0..=90.0).contains(&self.lat)
            && (-180.0..=180.0).contains(&self.lon)
    }
}

/// Equirectangular projection of `p` into meters east/north of `origin`.
///
/// Only meant for building-scale extents (well under a degree); the scale
/// factor is taken at the origin's latitude.
pub fn project(origin: GeoPoint, p: GeoPoint) -> LocalPoint {
    let dlat = (p.lat - origin.lat).to_radians();
    let dlon = (p.lon - origin.lon).to_radians();
    LocalPoint::new(EARTH_RADIUS_M * origin.lat.to_radians().cos() * dlon, EARTH_RADIUS_M * dlat)
}

/// Inverse of [`project`].
pub fn unproject(origin: GeoPoint, p: LocalPoint) -> GeoPoint {
    let dlat = p.y / EARTH_RADIUS_M;
    let dlon = p.x / (EARTH_RADIUS_M * origin.lat.to_radians().cos());
    GeoPoint::new(origin.lat + dlat.to_degrees(), origin.lon + dlon.to_degrees())
}
