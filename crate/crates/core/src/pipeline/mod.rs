//! parse → ambient occlusion → cull → sample → voxelize → write, for one file
//! or a whole directory tree.

mod fixture;

use std::fs;
use std::io;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use tracing::{debug, info, warn};

use crate::ao::{compute_face_quality_with, AoConfig};
use crate::cull::{cull_internal_faces, find_duplicate_groups, CullPolicy, CullReport, DuplicateMode};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::build_bvh;
use crate::mesh_io::{read_obj, write_ply, PlyEncoding};
use crate::sample::{sample_mesh_with, SampleConfig};
use crate::voxel::voxelize_with;

pub use fixture::{generate_fixture, FixtureKind};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub output: PathBuf,
    pub resolution: u32,
    pub ao: AoConfig,
    /// Carries the point count, seed and texture sampling options.
    pub sample: SampleConfig,
    pub duplicate_mode: DuplicateMode,
    pub cull_policy: CullPolicy,
    pub ply_encoding: PlyEncoding,
    pub jobs: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            input: PathBuf::new(),
            output: PathBuf::new(),
            resolution: 256,
            ao: AoConfig::default(),
            sample: SampleConfig::default(),
            duplicate_mode: DuplicateMode::default(),
            cull_policy: CullPolicy::default(),
            ply_encoding: PlyEncoding::default(),
            jobs: 1,
        }
    }
}

impl PipelineConfig {
    /// Uses the same seed for the occlusion jitter and surface sampling.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.ao.seed = seed;
        self.sample.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution < 2 {
            return Err(Error::Config(format!("resolution {} is below 2", self.resolution)));
        }
        if self.sample.n_points == 0 {
            return Err(Error::Config("point count must be at least 1".into()));
        }
        if self.jobs == 0 {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        self.ao.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryStatus {
    Ok,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub input: String,
    pub output: String,
    pub status: EntryStatus,
    pub faces_before: usize,
    pub faces_after: usize,
    pub cull: CullReport,
    pub points: usize,
    pub voxels: usize,
    pub wall_time_ms: f64,
}

impl ManifestEntry {
    pub fn is_ok(&self) -> bool {
        self.status == EntryStatus::Ok
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub ok: usize,
    pub failed: usize,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn new(entries: Vec<ManifestEntry>) -> Self {
        let ok = entries.iter().filter(|e| e.is_ok()).count();
        Manifest {
            ok,
            failed: entries.len() - ok,
            entries,
        }
    }
}

struct StageError {
    stage: &'static str,
    error: Error,
}

impl std::fmt::Display for StageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.error {
            Error::Io(e) if e.kind() == io::ErrorKind::NotFound => {
                write!(f, "{}: file not found", self.stage)
            }
            e => write!(f, "{}: {e}", self.stage),
        }
    }
}

trait Stage<T> {
    fn stage(self, stage: &'static str) -> std::result::Result<T, StageError>;
}

impl<T> Stage<T> for Result<T> {
    fn stage(self, stage: &'static str) -> std::result::Result<T, StageError> {
        self.map_err(|error| StageError { stage, error })
    }
}

fn display(path: &Path) -> String {
    path.to_string_lossy().replace('\\', "/")
}

/// Runs the whole pipeline on one OBJ file. Errors and panics are captured
/// in the returned entry instead of propagating.
pub fn process_file(cfg: &PipelineConfig, input: &Path, output: &Path, exec: Exec) -> ManifestEntry {
    let started = Instant::now();
    let mut entry = ManifestEntry {
        input: display(input),
        output: display(output),
        status: EntryStatus::Ok,
        faces_before: 0,
        faces_after: 0,
        cull: CullReport::default(),
        points: 0,
        voxels: 0,
        wall_time_ms: 0.0,
    };
    let outcome = catch_unwind(AssertUnwindSafe(|| run_stages(cfg, input, output, exec, &mut entry)));
    entry.status = match outcome {
        Ok(Ok(())) => EntryStatus::Ok,
        Ok(Err(e)) => EntryStatus::Failed(e.to_string()),
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            EntryStatus::Failed(format!("panic: {msg}"))
        }
    };
    entry.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
    match &entry.status {
        EntryStatus::Ok => info!(
            "{}: {} -> {} faces, {} voxels ({:.0} ms)",
            entry.input, entry.faces_before, entry.faces_after, entry.voxels, entry.wall_time_ms
        ),
        EntryStatus::Failed(reason) => warn!("{}: failed: {reason}", entry.input),
    }
    entry
}

fn run_stages(
    cfg: &PipelineConfig,
    input: &Path,
    output: &Path,
    exec: Exec,
    entry: &mut ManifestEntry,
) -> std::result::Result<(), StageError> {
    let mut clock = Instant::now();
    let mut lap = |stage: &str| {
        debug!("{}: {stage} took {:.1} ms", input.display(), clock.elapsed().as_secs_f64() * 1e3);
        clock = Instant::now();
    };

    let mesh = read_obj(input).stage("parse")?;
    entry.faces_before = mesh.face_count();
    lap("parse");

    let mesh = if cfg.cull_policy == CullPolicy::Off {
        mesh
    } else {
        let bvh = build_bvh(&mesh.triangles());
        let quality = compute_face_quality_with(&mesh, &bvh, &cfg.ao, exec).stage("ao")?;
        lap("ao");
        let groups = find_duplicate_groups(&mesh, cfg.duplicate_mode);
        let (culled, report) =
            cull_internal_faces(&mesh, &quality, &groups, cfg.cull_policy).stage("cull")?;
        entry.cull = report;
        lap("cull");
        culled
    };
    entry.faces_after = mesh.face_count();

    let cloud = sample_mesh_with(&mesh, &cfg.sample, exec).stage("sample")?;
    entry.points = cloud.len();
    lap("sample");

    let voxels = voxelize_with(&cloud, cfg.resolution, exec).stage("voxelize")?;
    entry.voxels = voxels.len();
    lap("voxelize");

    if let Some(dir) = output.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(Error::from).stage("write")?;
    }
    let file = fs::File::create(output).map_err(Error::from).stage("write")?;
    write_ply(&voxels, cfg.ply_encoding, file).stage("write")?;
    lap("write");
    Ok(())
}

/// Every `*.obj` under `root`, sorted by path.
pub fn discover_inputs(root: &Path) -> Result<Vec<PathBuf>> {
    let mut found = Vec::new();
    for entry in walkdir::WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| {
            Error::Io(e.into_io_error().unwrap_or_else(|| io::Error::other("directory walk failed")))
        })?;
        let is_obj = entry
            .path()
            .extension()
            .is_some_and(|ext| ext.eq_ignore_ascii_case("obj"));
        if entry.file_type().is_file() && is_obj {
            found.push(entry.into_path());
        }
    }
    found.sort();
    Ok(found)
}

/// Processes every OBJ under `cfg.input` with up to `cfg.jobs` workers,
/// mirrors the tree under `cfg.output` and writes `manifest.json` there.
/// Entries follow sorted input order whatever the completion order.
pub fn process_batch(cfg: &PipelineConfig) -> Result<Vec<ManifestEntry>> {
    cfg.validate()?;
    if !cfg.input.is_dir() {
        return Err(Error::Config(format!("{} is not a directory", cfg.input.display())));
    }
    let inputs = discover_inputs(&cfg.input)?;
    fs::create_dir_all(&cfg.output)?;
    info!("{} OBJ files under {}", inputs.len(), cfg.input.display());

    // Files are the main parallel axis; spare workers go to per-face and
    // per-point loops inside each file.
    let exec = if cfg.jobs > inputs.len() {
        Exec::Parallel
    } else {
        Exec::Sequential
    };
    let run_one = |input: &PathBuf| {
        let rel = input.strip_prefix(&cfg.input).unwrap_or(input);
        let output = cfg.output.join(rel).with_extension("ply");
        let mut entry = process_file(cfg, input, &output, exec);
        entry.input = display(rel);
        entry.output = display(&rel.with_extension("ply"));
        entry
    };
    let entries = run_workers(cfg.jobs, &inputs, run_one)?;

    let manifest = Manifest::new(entries);
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Io(e.into()))?;
    fs::write(cfg.output.join(MANIFEST_NAME), json + "\n")?;
    Ok(manifest.entries)
}

#[cfg(feature = "parallel")]
fn run_workers<F>(jobs: usize, inputs: &[PathBuf], f: F) -> Result<Vec<ManifestEntry>>
where
    F: Fn(&PathBuf) -> ManifestEntry + Sync + Send,
{
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    Ok(pool.install(|| inputs.par_iter().map(f).collect()))
}

#[cfg(not(feature = "parallel"))]
fn run_workers<F>(_jobs: usize, inputs: &[PathBuf], f: F) -> Result<Vec<ManifestEntry>>
where
    F: Fn(&PathBuf) -> ManifestEntry,
{
    Ok(inputs.iter().map(f).collect())
}
