use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tracing::error;

use meshsampler::ao::AoConfig;
use meshsampler::cull::{CullPolicy, DuplicateMode};
use meshsampler::mesh_io::PlyEncoding;
use meshsampler::pipeline::{generate_fixture, process_batch, process_file, FixtureKind, PipelineConfig};
use meshsampler::sample::{SampleConfig, TextureFilter, TextureSampling, WrapMode};
use meshsampler::Exec;

const EXIT_PARTIAL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "meshsampler", version, about = "Textured meshes to voxelized colored point clouds")]
struct Cli {
    /// Log per-stage timings.
    #[arg(short, long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a single OBJ file.
    Sample {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        opts: PipelineOpts,
    },
    /// Convert every OBJ under a directory and write manifest.json.
    Batch {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        opts: PipelineOpts,
        /// Worker threads (defaults to the number of CPUs).
        #[arg(short, long)]
        jobs: Option<usize>,
    },
    /// Write a synthetic test scene.
    Fixture {
        kind: FixtureArg,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Args)]
struct PipelineOpts {
    #[arg(long, default_value_t = 100_000)]
    points: usize,
    #[arg(long, default_value_t = 256)]
    resolution: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 256)]
    ao_directions: usize,
    #[arg(long, default_value_t = 4)]
    ao_samples: usize,
    #[arg(long, value_enum, default_value_t = DuplicateArg::Position)]
    duplicate_mode: DuplicateArg,
    #[arg(long, value_enum, default_value_t = CullArg::Full)]
    cull: CullArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Binary)]
    format: FormatArg,
    #[arg(long, value_enum, default_value_t = FilterArg::Bilinear)]
    texture_filter: FilterArg,
    /// Treat texture row 0 as v = 0.
    #[arg(long)]
    no_vflip: bool,
    /// Clamp texture coordinates instead of repeating.
    #[arg(long)]
    clamp_wrap: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum DuplicateArg {
    Index,
    Position,
}

#[derive(Clone, Copy, ValueEnum)]
enum CullArg {
    Full,
    DuplicatesOnly,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Ascii,
    Binary,
}

#[derive(Clone, Copy, ValueEnum)]
enum FilterArg {
    Nearest,
    Bilinear,
}

#[derive(Clone, Copy, ValueEnum)]
enum FixtureArg {
    DoubledCube,
    NestedCubes,
    TexturedQuad,
}

impl PipelineOpts {
    fn into_config(self, input: PathBuf, output: PathBuf, jobs: usize) -> PipelineConfig {
        PipelineConfig {
            input,
            output,
            resolution: self.resolution,
            ao: AoConfig {
                n_directions: self.ao_directions,
                samples_per_face: self.ao_samples,
                seed: self.seed,
            },
            sample: SampleConfig {
                n_points: self.points,
                seed: self.seed,
                texture: TextureSampling {
                    filter: match self.texture_filter {
                        FilterArg::Nearest => TextureFilter::Nearest,
                        FilterArg::Bilinear => TextureFilter::Bilinear,
                    },
                    wrap: if self.clamp_wrap { WrapMode::Clamp } else { WrapMode::Repeat },
                    flip_v: !self.no_vflip,
                },
            },
            duplicate_mode: match self.duplicate_mode {
                DuplicateArg::Index => DuplicateMode::ByIndex,
                DuplicateArg::Position => DuplicateMode::ByPosition,
            },
            cull_policy: match self.cull {
                CullArg::Full => CullPolicy::Full,
                CullArg::DuplicatesOnly => CullPolicy::DuplicatesOnly,
                CullArg::Off => CullPolicy::Off,
            },
            ply_encoding: match self.format {
                FormatArg::Ascii => PlyEncoding::Ascii,
                FormatArg::Binary => PlyEncoding::BinaryLittleEndian,
            },
            jobs,
        }
    }
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "debug" } else { "info" };
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_target(false)
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new(level)),
        )
        .init();

    match cli.command {
        Command::Sample { input, output, opts } => {
            let cfg = opts.into_config(input.clone(), output.clone(), default_jobs());
            if let Err(e) = cfg.validate() {
                error!("{e}");
                return ExitCode::from(EXIT_USAGE);
            }
            let entry = process_file(&cfg, &input, &output, Exec::default());
            if entry.is_ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_PARTIAL)
            }
        }
        Command::Batch {
            input,
            output,
            opts,
            jobs,
        } => {
            let cfg = opts.into_config(input, output, jobs.unwrap_or_else(default_jobs));
            match process_batch(&cfg) {
                Ok(entries) => {
                    let failed = entries.iter().filter(|e| !e.is_ok()).count();
                    tracing::info!("{} ok, {failed} failed", entries.len() - failed);
                    if failed == 0 {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(EXIT_PARTIAL)
                    }
                }
                Err(e) => {
                    error!("{e}");
                    ExitCode::from(EXIT_USAGE)
                }
            }
        }
        Command::Fixture { kind, output } => {
            let kind = match kind {
                FixtureArg::DoubledCube => FixtureKind::DoubledCube,
                FixtureArg::NestedCubes => FixtureKind::NestedCubes,
                FixtureArg::TexturedQuad => FixtureKind::TexturedQuad,
            };
            match generate_fixture(kind, &output) {
                Ok(path) => {
                    println!("{}", path.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    error!("{e}");
                    ExitCode::from(EXIT_PARTIAL)
                }
            }
        }
    }
}
