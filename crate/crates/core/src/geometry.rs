//! Planar geometry in a local east/north frame (meters).

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

/// Containment slack for points sitting on a geofence edge.
pub const CONTAINMENT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Moves from `self` toward `target` by at most `max_step`, never overshooting.
    pub fn step_toward(self, target: Vec2, max_step: f64) -> Vec2 {
        let delta = target - self;
        let dist = delta.norm();
        if dist <= max_step || dist == 0.0 {
            target
        } else {
            self + delta * (max_step / dist)
        }
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2::new(a[0], a[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

/// Closest point to `p` on the segment `a`-`b`.
pub fn closest_on_segment(p: Vec2, a: Vec2, b: Vec2) -> Vec2 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return a;
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    a + ab * t
}

/// A convex polygon, stored counter-clockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec2>", into = "Vec<Vec2>")]
pub struct ConvexPolygon {
    vertices: Vec<Vec2>,
}

impl ConvexPolygon {
    /// Builds a polygon from vertices in either winding order. Rejects
    /// degenerate and non-convex outlines.
    pub fn new(mut vertices: Vec<Vec2>) -> Result<Self, String> {
        if vertices.len() < 3 {
            return Err(format!(
                "geofence needs at least 3 vertices, got {}",
                vertices.len()
            ));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err("geofence vertex is not finite".into());
        }
        let n = vertices.len();
        let area2: f64 = (0..n)
            .map(|i| vertices[i].cross(vertices[(i + 1) % n]))
            .sum();
        if area2.abs() <= f64::EPSILON {
            return Err("geofence has zero area".into());
        }
        if area2 < 0.0 {
            vertices.reverse();
        }
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            if (b - a).cross(c - b) < -1e-12 {
                return Err(format!("geofence is not convex at vertex {}", (i + 1) % n));
            }
        }
        Ok(ConvexPolygon { vertices })
    }

    pub fn rectangle(min: Vec2, max: Vec2) -> Self {
        ConvexPolygon::new(vec![
            min,
            Vec2::new(max.x, min.y),
            max,
            Vec2::new(min.x, max.y),
        ])
        .expect("rectangle corners form a convex polygon")
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    fn edges(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Inclusive containment with a small absolute slack.
    pub fn contains(&self, p: Vec2) -> bool {
        self.edges().all(|(a, b)| {
            let edge = b - a;
            // Signed distance to the edge line, positive inside.
            edge.cross(p - a) / edge.norm() >= -CONTAINMENT_EPS
        })
    }

    /// Nearest point of the polygon to `p` (identity for inside points).
    pub fn project(&self, p: Vec2) -> Vec2 {
        if self.contains(p) {
            return p;
        }
        self.edges()
            .map(|(a, b)| closest_on_segment(p, a, b))
            .min_by(|u, v| u.distance(p).total_cmp(&v.distance(p)))
            .expect("polygon has edges")
    }

    /// Axis-aligned bounding box as (min, max).
    pub fn bounds(&self) -> (Vec2, Vec2) {
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for v in &self.vertices {
            lo = Vec2::new(lo.x.min(v.x), lo.y.min(v.y));
            hi = Vec2::new(hi.x.max(v.x), hi.y.max(v.y));
        }
        (lo, hi)
    }
}

impl TryFrom<Vec<Vec2>> for ConvexPolygon {
    type Error = String;
    fn try_from(v: Vec<Vec2>) -> Result<Self, String> {
        ConvexPolygon::new(v)
    }
}

impl From<ConvexPolygon> for Vec<Vec2> {
    fn from(p: ConvexPolygon) -> Self {
        p.vertices
    }
}
