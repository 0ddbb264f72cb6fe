//! Mesh and point-cloud data types plus the file formats that carry them:
//! Wavefront OBJ/MTL in, PLY out (and back in, for verification).

mod mtl;
mod obj;
mod ply;
mod texture;

use std::sync::Arc;

use glam::DVec3;

use crate::geometry::{Aabb, Triangle};

pub use mtl::parse_mtl;
pub use obj::{parse_obj, read_obj};
pub use ply::{read_ply, write_ply, PlyEncoding};
pub use texture::load_texture;

/// Diffuse color used for faces whose material is missing or unresolved.
pub const DEFAULT_DIFFUSE: [f64; 3] = [0.5, 0.5, 0.5];

/// An indexed triangle mesh with per-face materials.
#[derive(Debug, Clone, Default)]
pub struct Mesh {
    pub vertices: Vec<DVec3>,
    pub uvs: Vec<[f64; 2]>,
    pub faces: Vec<Face>,
    pub materials: Vec<Material>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Face {
    pub v: [usize; 3],
    pub uv: Option<[usize; 3]>,
    pub material: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    pub name: String,
    /// Linear-in-file `Kd` value, each channel clamped to `[0, 1]`.
    pub diffuse: [f64; 3],
    pub texture: Option<Arc<TextureImage>>,
}

impl Material {
    pub fn untextured(name: impl Into<String>, diffuse: [f64; 3]) -> Self {
        Material {
            name: name.into(),
            diffuse: diffuse.map(|c| c.clamp(0.0, 1.0)),
            texture: None,
        }
    }
}

/// 8-bit RGB image, rows stored top to bottom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextureImage {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl TextureImage {
    /// Returns `None` when a dimension is zero or the buffer length is not
    /// `width * height * 3`.
    pub fn new(width: u32, height: u32, pixels: Vec<u8>) -> Option<Self> {
        let expected = (width as usize)
            .checked_mul(height as usize)?
            .checked_mul(3)?;
        if width == 0 || height == 0 || pixels.len() != expected {
            return None;
        }
        Some(TextureImage {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }
}

impl Mesh {
    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn triangle(&self, face_index: usize) -> Triangle {
        let [a, b, c] = self.faces[face_index].v;
        Triangle {
            a: self.vertices[a],
            b: self.vertices[b],
            c: self.vertices[c],
            face_index,
        }
    }

    pub fn triangles(&self) -> Vec<Triangle> {
        (0..self.faces.len()).map(|i| self.triangle(i)).collect()
    }

    /// A face is degenerate when it repeats a vertex index or spans zero area.
    pub fn is_degenerate(&self, face_index: usize) -> bool {
        let [a, b, c] = self.faces[face_index].v;
        a == b || b == c || a == c || self.triangle(face_index).is_degenerate()
    }

    /// Bounds of all vertex records, referenced or not.
    pub fn bounds(&self) -> Option<Aabb> {
        Aabb::from_points(self.vertices.iter().copied())
    }

    pub fn material_of(&self, face_index: usize) -> Option<&Material> {
        self.faces[face_index]
            .material
            .and_then(|m| self.materials.get(m))
    }

    /// Returns the same mesh keeping only faces for which `keep` is true.
    /// Vertices, UVs and materials are shared unchanged.
    pub fn retain_faces(&self, mut keep: impl FnMut(usize) -> bool) -> Mesh {
        Mesh {
            vertices: self.vertices.clone(),
            uvs: self.uvs.clone(),
            faces: (0..self.faces.len())
                .filter(|&i| keep(i))
                .map(|i| self.faces[i])
                .collect(),
            materials: self.materials.clone(),
        }
    }
}

/// Colored points. When `grid_resolution` is `Some(r)` the cloud is
/// voxelized: coordinates are integers in `[0, r-1]` with no repeats.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointCloud {
    pub points: Vec<[f64; 3]>,
    pub colors: Vec<[u8; 3]>,
    pub grid_resolution: Option<u32>,
}

impl PointCloud {
    pub fn new(points: Vec<[f64; 3]>, colors: Vec<[u8; 3]>) -> Self {
        assert_eq!(points.len(), colors.len(), "one color per point");
        PointCloud {
            points,
            colors,
            grid_resolution: None,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Checks the voxelized-cloud invariants. Non-voxelized clouds only need
    /// matching lengths.
    pub fn check_invariants(&self) -> Result<(), String> {
        if self.points.len() != self.colors.len() {
            return Err(format!(
                "{} points but {} colors",
                self.points.len(),
                self.colors.len()
            ));
        }
        let Some(r) = self.grid_resolution else {
            return Ok(());
        };
        let max = f64::from(r) - 1.0;
        let mut seen = std::collections::HashSet::with_capacity(self.points.len());
        for p in &self.points {
            for &c in p {
                if c.fract() != 0.0 || !(0.0..=max).contains(&c) {
                    return Err(format!("coordinate {c} is not an integer in [0, {max}]"));
                }
            }
            if !seen.insert(p.map(|c| c as u32)) {
                return Err(format!("duplicate voxel {p:?}"));
            }
        }
        Ok(())
    }
}
