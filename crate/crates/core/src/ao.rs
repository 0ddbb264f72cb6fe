//! Per-face visibility from a set of viewers at infinity.
//!
//! A face earns one count for every (direction, sample point) pair where the
//! viewer direction lies in front of the face and a ray from the sample point
//! toward the viewer escapes the mesh. Faces that point into a closed shell,
//! or that sit inside another shell, end up with zero.

use std::f64::consts::PI;

use glam::DVec3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_indices, Exec};
use crate::geometry::{face_normal, Bvh, Ray};
use crate::mesh_io::Mesh;
use crate::rng::{Domain, KeyedRng};
use crate::sample::sample_point_on_face;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AoConfig {
    pub n_directions: usize,
    pub samples_per_face: usize,
    pub seed: u64,
}

impl Default for AoConfig {
    fn default() -> Self {
        AoConfig {
            n_directions: 256,
            samples_per_face: 4,
            seed: 0,
        }
    }
}

impl AoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_directions == 0 || self.samples_per_face == 0 {
            return Err(Error::Config(
                "ao directions and samples per face must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// One visibility score in `[0, 1]` per face.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceQuality {
    pub values: Vec<f64>,
}

/// Anything that answers "does this ray hit another face before `t_max`".
pub trait Occluder: Sync {
    /// Distance used both as ray-origin offset and as minimum hit parameter.
    fn epsilon(&self) -> f64;
    fn occluded(&self, ray: &Ray, ignore_face: usize) -> bool;
}

impl Occluder for Bvh {
    fn epsilon(&self) -> f64 {
        Bvh::epsilon(self)
    }

    fn occluded(&self, ray: &Ray, ignore_face: usize) -> bool {
        Bvh::occluded(self, ray, ignore_face)
    }
}

/// `n` directions on the spherical Fibonacci lattice.
pub fn generate_directions(n: usize) -> Vec<DVec3> {
    let golden_angle = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden_angle * i as f64;
            DVec3::new(r * phi.cos(), r * phi.sin(), z).normalize()
        })
        .collect()
}

pub fn compute_face_quality(mesh: &Mesh, occluder: &impl Occluder, cfg: &AoConfig) -> Result<FaceQuality> {
    compute_face_quality_with(mesh, occluder, cfg, Exec::default())
}

pub fn compute_face_quality_with(
    mesh: &Mesh,
    occluder: &impl Occluder,
    cfg: &AoConfig,
    exec: Exec,
) -> Result<FaceQuality> {
    cfg.validate()?;
    let directions = generate_directions(cfg.n_directions);
    let pairs = (cfg.n_directions * cfg.samples_per_face) as f64;
    let values = map_indices(exec, mesh.face_count(), |face| {
        visible_pairs(mesh, occluder, cfg, &directions, face) as f64 / pairs
    });
    Ok(FaceQuality { values })
}

/// Sample points on a face: the centroid, then seeded uniform points.
pub fn face_sample_points(mesh: &Mesh, face: usize, cfg: &AoConfig) -> Vec<DVec3> {
    let tri = mesh.triangle(face);
    let mut points = Vec::with_capacity(cfg.samples_per_face);
    points.push(tri.centroid());
    for sample in 1..cfg.samples_per_face {
        let mut rng = KeyedRng::new(cfg.seed, Domain::AoJitter, face as u64, sample as u64);
        let (r1, r2) = (rng.unit(), rng.unit());
        points.push(sample_point_on_face(&tri, r1, r2).0);
    }
    points
}

fn visible_pairs(
    mesh: &Mesh,
    occluder: &impl Occluder,
    cfg: &AoConfig,
    directions: &[DVec3],
    face: usize,
) -> usize {
    if mesh.is_degenerate(face) {
        return 0;
    }
    let Ok(normal) = face_normal(&mesh.triangle(face)) else {
        return 0;
    };
    let offset = normal * occluder.epsilon();
    let origins: Vec<DVec3> = face_sample_points(mesh, face, cfg)
        .into_iter()
        .map(|p| p + offset)
        .collect();
    directions
        .iter()
        .filter(|d| normal.dot(**d) > 0.0)
        .map(|&d| {
            origins
                .iter()
                .filter(|&&o| !occluder.occluded(&Ray::unbounded(o, d), face))
                .count()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_bvh;
    use crate::mesh_io::Face;

    #[test]
    fn one_direction_is_unit() {
        let d = generate_directions(1);
        assert_eq!(d.len(), 1);
        assert!((d[0].length() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lattice_is_balanced_and_spread() {
        let d = generate_directions(256);
        assert!(d.iter().all(|v| (v.length() - 1.0).abs() < 1e-9));
        let mean = d.iter().copied().sum::<DVec3>() / 256.0;
        assert!(mean.length() < 0.05, "mean norm {}", mean.length());
        let mut min_angle = f64::INFINITY;
        for i in 0..d.len() {
            for j in i + 1..d.len() {
                min_angle = min_angle.min(d[i].dot(d[j]).clamp(-1.0, 1.0).acos());
            }
        }
        assert!(min_angle.to_degrees() > 5.0, "min angle {}", min_angle.to_degrees());
    }

    fn single_triangle() -> Mesh {
        Mesh {
            vertices: vec![DVec3::ZERO, DVec3::X, DVec3::Y],
            faces: vec![Face {
                v: [0, 1, 2],
                uv: None,
                material: None,
            }],
            ..Mesh::default()
        }
    }

    #[test]
    fn isolated_triangle_sees_half_the_sphere() {
        let mesh = single_triangle();
        let bvh = build_bvh(&mesh.triangles());
        let cfg = AoConfig { samples_per_face: 1, ..AoConfig::default() };
        let q = compute_face_quality(&mesh, &bvh, &cfg).unwrap();
        // Exactly 128 of the 256 lattice directions have z > 0.
        assert_eq!(q.values, vec![0.5]);
    }

    #[test]
    fn degenerate_faces_score_zero() {
        let mut mesh = single_triangle();
        mesh.faces.push(Face { v: [0, 0, 1], uv: None, material: None });
        let bvh = build_bvh(&mesh.triangles());
        let q = compute_face_quality(&mesh, &bvh, &AoConfig::default()).unwrap();
        assert_eq!(q.values[1], 0.0);
    }

    #[test]
    fn rejects_zero_counts() {
        let mesh = single_triangle();
        let bvh = build_bvh(&mesh.triangles());
        let cfg = AoConfig { n_directions: 0, ..AoConfig::default() };
        assert!(compute_face_quality(&mesh, &bvh, &cfg).is_err());
    }

    #[test]
    fn sample_points_start_at_centroid() {
        let mesh = single_triangle();
        let pts = face_sample_points(&mesh, 0, &AoConfig::default());
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[0], mesh.triangle(0).centroid());
        assert_eq!(pts, face_sample_points(&mesh, 0, &AoConfig::default()));
    }
}
