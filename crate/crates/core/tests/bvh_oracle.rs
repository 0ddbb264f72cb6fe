mod common;

use common::{random_point, random_triangles, random_unit, rng, BruteForce};
use glam::DVec3;
use meshsampler::ao::Occluder;
use meshsampler::geometry::{build_bvh, Ray};
use rand::RngExt;

#[test]
fn ten_thousand_triangles_agree_with_brute_force() {
    let mut rng = rng(0xB7);
    let tris = random_triangles(&mut rng, 10_000, 0.05);
    let bvh = build_bvh(&tris);
    bvh.validate().unwrap();
    assert_eq!(bvh.len(), tris.len());
    let oracle = BruteForce::new(tris);
    assert_eq!(bvh.epsilon(), oracle.epsilon);

    let mut hits = 0;
    for _ in 0..1000 {
        let ray = Ray::unbounded(random_point(&mut rng, -0.2, 1.2), random_unit(&mut rng));
        let ignore = rng.random_range(0..10_000);
        let expected = oracle.occluded(&ray, ignore);
        assert_eq!(bvh.occluded(&ray, ignore), expected, "{ray:?}");
        hits += expected as usize;
    }
    // Both outcomes must be exercised for the comparison to mean anything.
    assert!(hits > 100 && hits < 900, "hits = {hits}");
}

#[test]
fn bounded_rays_agree_with_brute_force() {
    let mut rng = rng(0xB8);
    let tris = random_triangles(&mut rng, 300, 0.3);
    let bvh = build_bvh(&tris);
    let oracle = BruteForce::new(tris);
    for _ in 0..2000 {
        let t_max = rng.random_range(0.01..1.0);
        let ray = Ray::new(random_point(&mut rng, 0.0, 1.0), random_unit(&mut rng), t_max);
        let ignore = rng.random_range(0..300);
        assert_eq!(bvh.occluded(&ray, ignore), oracle.occluded(&ray, ignore));
    }
}

/// Inner box faces looking outward are blocked by the enclosing box.
#[test]
fn enclosed_face_is_occluded() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = common::fixture_mesh(meshsampler::pipeline::FixtureKind::NestedCubes, dir.path());
    let tris = mesh.triangles();
    let bvh = build_bvh(&tris);
    let oracle = BruteForce::new(tris.clone());
    let mut rng = rng(3);
    // Faces 12.. are the inner cube.
    for (face, t) in tris.iter().enumerate().skip(12) {
        let n = meshsampler::geometry::face_normal(t).unwrap();
        for _ in 0..50 {
            let mut d = random_unit(&mut rng);
            if d.dot(n) < 0.0 {
                d = -d;
            }
            let ray = Ray::unbounded(t.centroid() + n * bvh.epsilon(), d);
            assert!(oracle.occluded(&ray, face));
            assert!(bvh.occluded(&ray, face));
        }
    }
    // The outer cube's faces look out onto nothing.
    for (face, t) in tris.iter().enumerate().take(12) {
        let n = meshsampler::geometry::face_normal(t).unwrap();
        let ray = Ray::unbounded(t.centroid() + n * bvh.epsilon(), n);
        assert!(!bvh.occluded(&ray, face));
        assert!(!oracle.occluded(&ray, face));
    }
}

#[test]
fn isolated_cube_never_blocks_outward_rays() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = common::fixture_mesh(meshsampler::pipeline::FixtureKind::DoubledCube, dir.path());
    let outer = mesh.retain_faces(|f| f < 12);
    let bvh = build_bvh(&outer.triangles());
    for face in 0..12 {
        let t = outer.triangle(face);
        let n = meshsampler::geometry::face_normal(&t).unwrap();
        let ray = Ray::unbounded(t.centroid() + n * bvh.epsilon(), n);
        assert!(!bvh.occluded(&ray, face));
    }
    // Straight into the cube from outside hits it.
    let ray = Ray::unbounded(DVec3::new(0.5, 0.5, 3.0), -DVec3::Z);
    assert!(bvh.occluded(&ray, usize::MAX));
}

#[test]
fn build_is_deterministic_for_fixed_order() {
    let mut rng = rng(11);
    let tris = random_triangles(&mut rng, 2000, 0.1);
    assert_eq!(build_bvh(&tris), build_bvh(&tris));
}
