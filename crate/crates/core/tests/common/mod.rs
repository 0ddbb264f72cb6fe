//! Test-only oracles and scene builders. Nothing here calls into the code
//! paths it is used to check.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::Path;

use glam::DVec3;
use meshsampler::ao::Occluder;
use meshsampler::geometry::{Ray, Triangle};
use meshsampler::mesh_io::{read_obj, Face, Mesh, PointCloud};
use meshsampler::pipeline::{generate_fixture, FixtureKind};
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

/// Loops over every triangle with a plane-hit plus edge-side test.
pub struct BruteForce {
    pub triangles: Vec<Triangle>,
    pub epsilon: f64,
}

impl BruteForce {
    pub fn new(triangles: Vec<Triangle>) -> Self {
        let mut lo = DVec3::splat(f64::INFINITY);
        let mut hi = DVec3::splat(f64::NEG_INFINITY);
        for t in &triangles {
            for p in [t.a, t.b, t.c] {
                lo = lo.min(p);
                hi = hi.max(p);
            }
        }
        let epsilon = if triangles.is_empty() { 0.0 } else { (hi - lo).length() * 1e-4 };
        BruteForce { triangles, epsilon }
    }

    pub fn hit_parameter(t: &Triangle, origin: DVec3, dir: DVec3) -> Option<f64> {
        let n = (t.b - t.a).cross(t.c - t.a);
        let denom = n.dot(dir);
        if denom == 0.0 {
            return None;
        }
        let s = n.dot(t.a - origin) / denom;
        let q = origin + dir * s;
        let side = |p: DVec3, r: DVec3| (r - p).cross(q - p).dot(n);
        let inside = side(t.a, t.b) >= 0.0 && side(t.b, t.c) >= 0.0 && side(t.c, t.a) >= 0.0;
        inside.then_some(s)
    }
}

impl Occluder for BruteForce {
    fn epsilon(&self) -> f64 {
        self.epsilon
    }

    fn occluded(&self, ray: &Ray, ignore_face: usize) -> bool {
        self.triangles.iter().any(|t| {
            t.face_index != ignore_face
                && Self::hit_parameter(t, ray.origin, ray.direction)
                    .is_some_and(|s| s > self.epsilon && s < ray.t_max)
        })
    }
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_point(rng: &mut StdRng, lo: f64, hi: f64) -> DVec3 {
    DVec3::new(
        rng.random_range(lo..hi),
        rng.random_range(lo..hi),
        rng.random_range(lo..hi),
    )
}

pub fn random_unit(rng: &mut StdRng) -> DVec3 {
    loop {
        let v = random_point(rng, -1.0, 1.0);
        let l = v.length();
        if l > 1e-3 && l <= 1.0 {
            return v / l;
        }
    }
}

/// Triangle soup inside the unit cube with edge lengths up to `size`.
pub fn random_triangles(rng: &mut StdRng, n: usize, size: f64) -> Vec<Triangle> {
    (0..n)
        .map(|i| {
            let a = random_point(rng, 0.0, 1.0);
            let b = a + random_point(rng, -size, size);
            let c = a + random_point(rng, -size, size);
            Triangle::new(a, b, c, i)
        })
        .collect()
}

pub fn mesh_from_triangles(tris: &[[DVec3; 3]]) -> Mesh {
    Mesh {
        vertices: tris.iter().flatten().copied().collect(),
        faces: (0..tris.len())
            .map(|i| Face {
                v: [3 * i, 3 * i + 1, 3 * i + 2],
                uv: None,
                material: None,
            })
            .collect(),
        ..Mesh::default()
    }
}

pub fn fixture_mesh(kind: FixtureKind, dir: &Path) -> Mesh {
    read_obj(&generate_fixture(kind, dir).unwrap()).unwrap()
}

/// Independent voxel merge: hash map keyed by quantized coordinates,
/// written directly from the transform definition.
pub fn voxel_oracle(cloud: &PointCloud, r: u32) -> (Vec<[f64; 3]>, Vec<[u8; 3]>) {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in &cloud.points {
        for k in 0..3 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let span = (r - 1) as f64;
    let extent: Vec<f64> = (0..3).map(|k| hi[k] - lo[k]).collect();
    let longest = extent.iter().cloned().fold(0.0, f64::max);
    let s = if longest > 0.0 { span / longest } else { 1.0 };
    let mut cells: BTreeMap<[i64; 3], Vec<[u8; 3]>> = BTreeMap::new();
    for (p, c) in cloud.points.iter().zip(&cloud.colors) {
        let mut key = [0i64; 3];
        for k in 0..3 {
            let shift = (span - extent[k] * s) / 2.0;
            let x = (p[k] - lo[k]) * s + shift;
            key[k] = ((x + 0.5).floor() as i64).clamp(0, r as i64 - 1);
        }
        cells.entry(key).or_default().push(*c);
    }
    let mut points = Vec::new();
    let mut colors = Vec::new();
    for (key, members) in cells {
        points.push(key.map(|v| v as f64));
        let n = members.len() as f64;
        let mut mean = [0u8; 3];
        for k in 0..3 {
            let total: f64 = members.iter().map(|c| c[k] as f64).sum();
            mean[k] = (total / n + 0.5).floor() as u8;
        }
        colors.push(mean);
    }
    (points, colors)
}

/// Barycentric coordinates of `p` on `t`, from areas (no shared code with
/// the sampler).
pub fn barycentric_of(t: &Triangle, p: DVec3) -> [f64; 3] {
    let n = (t.b - t.a).cross(t.c - t.a);
    let area2 = n.length_squared();
    let wa = (t.c - t.b).cross(p - t.b).dot(n) / area2;
    let wb = (t.a - t.c).cross(p - t.c).dot(n) / area2;
    [wa, wb, 1.0 - wa - wb]
}

/// A UV sphere with `slices * (stacks - 1) * 2` triangles, optionally with
/// every triangle duplicated in reverse winding.
pub fn uv_sphere_obj(slices: usize, stacks: usize, doubled: bool) -> String {
    use std::f64::consts::PI;
    use std::fmt::Write;
    let mut obj = String::new();
    writeln!(obj, "v 0 0 1").unwrap();
    for i in 1..stacks {
        let theta = PI * i as f64 / stacks as f64;
        for j in 0..slices {
            let phi = 2.0 * PI * j as f64 / slices as f64;
            writeln!(obj, "v {} {} {}", theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()).unwrap();
        }
    }
    writeln!(obj, "v 0 0 -1").unwrap();
    let ring = |i: usize, j: usize| 2 + (i - 1) * slices + (j % slices);
    let bottom = 2 + (stacks - 1) * slices;
    let mut tris = Vec::new();
    for j in 0..slices {
        tris.push([1, ring(1, j), ring(1, j + 1)]);
        tris.push([bottom, ring(stacks - 1, j + 1), ring(stacks - 1, j)]);
    }
    for i in 1..stacks - 1 {
        for j in 0..slices {
            let (a, b, c, d) = (ring(i, j), ring(i + 1, j), ring(i + 1, j + 1), ring(i, j + 1));
            tris.push([a, b, c]);
            tris.push([a, c, d]);
        }
    }
    for t in &tris {
        writeln!(obj, "f {} {} {}", t[0], t[1], t[2]).unwrap();
    }
    if doubled {
        for t in &tris {
            writeln!(obj, "f {} {} {}", t[0], t[2], t[1]).unwrap();
        }
    }
    obj
}

pub fn count_color(cloud: &PointCloud, color: [u8; 3]) -> usize {
    cloud.colors.iter().filter(|&&c| c == color).count()
}
