//! Planar vector helpers and segment intersection shared by the map and the
//! estimator.

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A 2D vector in the local metric frame (meters east, meters north).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

/// Position in meters relative to the map origin.
pub type LocalPoint = Vec2;

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    /// Unit vector at `theta` radians counter-clockwise from +x.
    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Vec2 { x: c, y: s }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z component of the 3D cross product.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    pub fn normalized(self) -> Option<Vec2> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(Vec2::new(self.x / n, self.y / n))
        } else {
            None
        }
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    /// Rotate counter-clockwise by `theta` radians.
    pub fn rotated(self, theta: f64) -> Vec2 {
        let (s, c) = theta.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Wrap an angle into (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

/// Signed angle that rotates `from` onto `to`, in (-pi, pi].
pub fn signed_angle(from: Vec2, to: Vec2) -> f64 {
    from.cross(to).atan2(from.dot(to))
}

/// Straight wall piece between two map vertices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Vec2,
    pub b: Vec2,
}

impl Segment {
    pub const fn new(a: Vec2, b: Vec2) -> Self {
        Segment { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }

    pub fn direction(&self) -> Option<Vec2> {
        (self.b - self.a).normalized()
    }

    pub fn closest_point(&self, p: Vec2) -> Vec2 {
        let d = self.b - self.a;
        let len2 = d.dot(d);
        if len2 == 0.0 {
            return self.a;
        }
        let t = ((p - self.a).dot(d) / len2).clamp(0.0, 1.0);
        self.a + d * t
    }
}

/// Where a motion segment `a -> b` strictly passes through `wall`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    /// Parameter along the motion segment, in (0, 1].
    pub t: f64,
    pub point: Vec2,
}

/// Strict crossing test: the motion must start strictly on one side of the
/// wall's line and end strictly on the other, with the intersection inside
/// the wall's extent (end vertices included). Touching, ending on the wall,
/// starting on the wall and collinear sliding are not crossings.
pub fn strict_crossing(a: Vec2, b: Vec2, wall: &Segment) -> Option<Crossing> {
    let w = wall.b - wall.a;
    let side_a = w.cross(a - wall.a);
    let side_b = w.cross(b - wall.a);
    if side_a == 0.0 || side_b == 0.0 || (side_a > 0.0) == (side_b > 0.0) {
        return None;
    }
    let d = b - a;
    let denom = d.cross(w);
    if denom == 0.0 {
        return None;
    }
    // a + t d = wall.a + u w
    let t = (wall.a - a).cross(w) / denom;
    let u = (wall.a - a).cross(d) / denom;
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let t = t.clamp(0.0, 1.0);
    Some(Crossing { t, point: a + d * t })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert!((wrap_angle(4.0 * PI + 0.1) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn signed_angle_sign() {
        let x = Vec2::new(1.0, 0.0);
        let y = Vec2::new(0.0, 1.0);
        assert!((signed_angle(x, y) - PI / 2.0).abs() < 1e-15);
        assert!((signed_angle(y, x) + PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn crossing_through_wall_center() {
        let wall = Segment::new(Vec2::new(-5.0, 0.0), Vec2::new(5.0, 0.0));
        let c = strict_crossing(Vec2::new(0.0, -1.0), Vec2::new(0.0, 1.0), &wall).unwrap();
        assert!((c.t - 0.5).abs() < 1e-15);
        assert_eq!(c.point, Vec2::new(0.0, 0.0));
    }

    #[test]
    fn touching_and_sliding_are_not_crossings() {
        let wall = Segment::new(Vec2::new(-5.0, 0.0), Vec2::new(5.0, 0.0));
        // ends on the wall
        assert!(strict_crossing(Vec2::new(0.0, -1.0), Vec2::new(0.0, 0.0), &wall).is_none());
        // starts on the wall
        assert!(strict_crossing(Vec2::new(0.0, 0.0), Vec2::new(0.0, 1.0), &wall).is_none());
        // collinear slide
        assert!(strict_crossing(Vec2::new(-1.0, 0.0), Vec2::new(2.0, 0.0), &wall).is_none());
        // passes beyond the wall's end
        assert!(strict_crossing(Vec2::new(6.0, -1.0), Vec2::new(6.0, 1.0), &wall).is_none());
    }
}
