use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use meshsampler::ao::{compute_face_quality_with, AoConfig};
use meshsampler::geometry::build_bvh;
use meshsampler::mesh_io::read_obj;
use meshsampler::pipeline::{generate_fixture, FixtureKind};
use meshsampler::sample::{sample_mesh_with, SampleConfig};
use meshsampler::voxel::voxelize_with;
use meshsampler::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn kernels(c: &mut Criterion) {
    let dir = tempfile::tempdir().unwrap();
    let mesh = read_obj(&generate_fixture(FixtureKind::NestedCubes, dir.path()).unwrap()).unwrap();
    let bvh = build_bvh(&mesh.triangles());
    let ao = AoConfig::default();
    let sample = SampleConfig { n_points: 100_000, ..SampleConfig::default() };
    let cloud = sample_mesh_with(&mesh, &sample, Exec::Sequential).unwrap();

    let mut group = c.benchmark_group("kernels");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new("ao", name), &exec, |b, &exec| {
            b.iter(|| compute_face_quality_with(&mesh, &bvh, &ao, exec).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sample", name), &exec, |b, &exec| {
            b.iter(|| sample_mesh_with(&mesh, &sample, exec).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("voxelize", name), &exec, |b, &exec| {
            b.iter(|| voxelize_with(&cloud, 256, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
