//! Triangle math and the BVH used for occlusion queries.

mod bvh;

use glam::DVec3;

use crate::error::{Error, Result};

pub use bvh::{build_bvh, Bvh};

/// Sine of the smallest corner angle below which a triangle counts as
/// degenerate.
const DEGENERATE_SINE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    pub a: DVec3,
    pub b: DVec3,
    pub c: DVec3,
    pub face_index: usize,
}

impl Triangle {
    pub fn new(a: DVec3, b: DVec3, c: DVec3, face_index: usize) -> Self {
        Triangle { a, b, c, face_index }
    }

    #[inline]
    fn cross(&self) -> DVec3 {
        (self.b - self.a).cross(self.c - self.a)
    }

    pub fn is_degenerate(&self) -> bool {
        let e1 = self.b - self.a;
        let e2 = self.c - self.a;
        let cross = e1.cross(e2).length();
        let limit = DEGENERATE_SINE * e1.length() * e2.length();
        cross.is_nan() || cross <= limit
    }

    pub fn centroid(&self) -> DVec3 {
        (self.a + self.b + self.c) / 3.0
    }

    pub fn bounds(&self) -> Aabb {
        Aabb {
            min: self.a.min(self.b).min(self.c),
            max: self.a.max(self.b).max(self.c),
        }
    }

    /// Ray parameter of the hit, Möller–Trumbore style. Edges count as hits
    /// up to a tiny barycentric tolerance so shared edges rarely leak.
    #[inline]
    pub fn intersect(&self, origin: DVec3, dir: DVec3) -> Option<f64> {
        const EDGE_TOL: f64 = 1e-12;
        let e1 = self.b - self.a;
        let e2 = self.c - self.a;
        let p = dir.cross(e2);
        let det = e1.dot(p);
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let inv = 1.0 / det;
        let s = origin - self.a;
        let u = s.dot(p) * inv;
        if !(-EDGE_TOL..=1.0 + EDGE_TOL).contains(&u) {
            return None;
        }
        let q = s.cross(e1);
        let v = dir.dot(q) * inv;
        if v < -EDGE_TOL || u + v > 1.0 + EDGE_TOL {
            return None;
        }
        Some(e2.dot(q) * inv)
    }
}

/// Unit normal following the right-hand rule over `a, b, c`.
pub fn face_normal(t: &Triangle) -> Result<DVec3> {
    if t.is_degenerate() {
        return Err(Error::DegenerateGeometry);
    }
    Ok(t.cross().normalize())
}

pub fn face_area(t: &Triangle) -> f64 {
    t.cross().length() * 0.5
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub origin: DVec3,
    pub direction: DVec3,
    pub t_max: f64,
}

impl Ray {
    /// `direction` is normalized here; `t_max` may be `f64::INFINITY`.
    pub fn new(origin: DVec3, direction: DVec3, t_max: f64) -> Self {
        let direction = direction.normalize();
        debug_assert!((direction.length() - 1.0).abs() < 1e-6);
        Ray {
            origin,
            direction,
            t_max,
        }
    }

    pub fn unbounded(origin: DVec3, direction: DVec3) -> Self {
        Ray::new(origin, direction, f64::INFINITY)
    }

    /// Component-wise reciprocal for slab tests. Zero components map to
    /// `f64::MAX` so a ray lying in a slab plane yields `0 * MAX = 0`
    /// instead of NaN.
    pub fn inv_direction(&self) -> DVec3 {
        let inv = |d: f64| if d == 0.0 { f64::MAX.copysign(d) } else { 1.0 / d };
        DVec3::new(
            inv(self.direction.x),
            inv(self.direction.y),
            inv(self.direction.z),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: DVec3,
    pub max: DVec3,
}

impl Aabb {
    pub const EMPTY: Aabb = Aabb {
        min: DVec3::splat(f64::INFINITY),
        max: DVec3::splat(f64::NEG_INFINITY),
    };

    pub fn from_points(points: impl IntoIterator<Item = DVec3>) -> Option<Aabb> {
        let b = points.into_iter().fold(Aabb::EMPTY, |b, p| b.grow(p));
        (b.min.x <= b.max.x).then_some(b)
    }

    #[inline]
    pub fn grow(self, p: DVec3) -> Aabb {
        Aabb {
            min: self.min.min(p),
            max: self.max.max(p),
        }
    }

    #[inline]
    pub fn union(self, o: Aabb) -> Aabb {
        Aabb {
            min: self.min.min(o.min),
            max: self.max.max(o.max),
        }
    }

    pub fn extent(&self) -> DVec3 {
        self.max - self.min
    }

    pub fn diagonal(&self) -> f64 {
        self.extent().length()
    }

    pub fn contains(&self, o: &Aabb) -> bool {
        self.min.cmple(o.min).all() && self.max.cmpge(o.max).all()
    }

    /// Slab test against `[t_min, t_max]`.
    #[inline]
    pub fn hit(&self, origin: DVec3, inv_dir: DVec3, t_min: f64, t_max: f64) -> bool {
        let t0 = (self.min - origin) * inv_dir;
        let t1 = (self.max - origin) * inv_dir;
        let near = t0.min(t1).max_element().max(t_min);
        let far = t0.max(t1).min_element().min(t_max);
        near <= far
    }
}
