//! Textured mesh to voxelized colored point cloud conversion.
//!
//! Meshes exported with coincident, oppositely wound faces of different
//! colors produce speckled point clouds when sampled naively. This crate
//! scores every face by how visible it is from viewers surrounding the model,
//! keeps only the most visible face among coincident ones (and drops faces
//! nobody outside can see), then samples the surface uniformly with texture
//! colors and quantizes the result onto a cubic grid.
//!
//! ```no_run
//! use meshsampler::pipeline::{process_file, PipelineConfig};
//! use meshsampler::Exec;
//! use std::path::Path;
//!
//! let cfg = PipelineConfig::default().with_seed(7);
//! let entry = process_file(&cfg, Path::new("chair.obj"), Path::new("chair.ply"), Exec::default());
//! assert!(entry.is_ok());
//! ```

pub mod ao;
pub mod cull;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod mesh_io;
pub mod pipeline;
mod rng;
pub mod sample;
pub mod voxel;

pub use error::{Error, Result};
pub use exec::Exec;
