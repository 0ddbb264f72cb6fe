//! Uniform random sampling of a mesh surface with per-point color lookup.

use glam::DVec3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_indices, Exec};
use crate::geometry::{face_area, Triangle};
use crate::mesh_io::{Mesh, PointCloud, TextureImage, DEFAULT_DIFFUSE};
use crate::rng::{Domain, KeyedRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TextureFilter {
    Nearest,
    #[default]
    Bilinear,
}

/// How texture coordinates outside `[0, 1)` are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WrapMode {
    #[default]
    Repeat,
    Clamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextureSampling {
    pub filter: TextureFilter,
    pub wrap: WrapMode,
    /// Texture row 0 corresponds to `v = 1` (the usual OBJ convention).
    pub flip_v: bool,
}

impl Default for TextureSampling {
    fn default() -> Self {
        TextureSampling {
            filter: TextureFilter::Bilinear,
            wrap: WrapMode::Repeat,
            flip_v: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub n_points: usize,
    pub seed: u64,
    pub texture: TextureSampling,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            n_points: 100_000,
            seed: 0,
            texture: TextureSampling::default(),
        }
    }
}

/// Cumulative face areas over the non-degenerate faces, in mesh order.
#[derive(Debug, Clone, PartialEq)]
pub struct AreaCdf {
    pub cumulative: Vec<f64>,
    pub face_map: Vec<usize>,
}

impl AreaCdf {
    pub fn total(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    /// Mesh face whose CDF interval contains `u * total`, for `u` in `[0, 1)`.
    pub fn pick(&self, u: f64) -> usize {
        let target = u * self.total();
        let slot = self
            .cumulative
            .partition_point(|&c| c <= target)
            .min(self.cumulative.len() - 1);
        self.face_map[slot]
    }
}

pub fn build_area_cdf(mesh: &Mesh) -> Result<AreaCdf> {
    let mut cumulative = Vec::new();
    let mut face_map = Vec::new();
    let mut total = 0.0;
    for face in 0..mesh.face_count() {
        if mesh.is_degenerate(face) {
            continue;
        }
        let area = face_area(&mesh.triangle(face));
        if !(area > 0.0 && area.is_finite()) {
            continue;
        }
        total += area;
        cumulative.push(total);
        face_map.push(face);
    }
    if cumulative.is_empty() {
        return Err(Error::EmptySurface);
    }
    Ok(AreaCdf {
        cumulative,
        face_map,
    })
}

/// Square-root warp of two uniforms onto the triangle. Returns the point and
/// its barycentric weights for `a`, `b`, `c`.
#[inline]
pub fn sample_point_on_face(t: &Triangle, r1: f64, r2: f64) -> (DVec3, [f64; 3]) {
    let s = r1.sqrt();
    let w = [1.0 - s, s * (1.0 - r2), s * r2];
    (w[0] * t.a + w[1] * t.b + w[2] * t.c, w)
}

fn round_channel(v: f64) -> u8 {
    (v + 0.5).floor().clamp(0.0, 255.0) as u8
}

fn wrap_coord(x: f64, wrap: WrapMode) -> f64 {
    match wrap {
        WrapMode::Repeat => x - x.floor(),
        WrapMode::Clamp => x.clamp(0.0, 1.0),
    }
}

fn texel_index(i: i64, size: u32, wrap: WrapMode) -> u32 {
    let size = i64::from(size);
    match wrap {
        WrapMode::Repeat => i.rem_euclid(size) as u32,
        WrapMode::Clamp => i.clamp(0, size - 1) as u32,
    }
}

/// Samples `tex` at texture coordinate `uv`.
pub fn sample_texture(tex: &TextureImage, uv: [f64; 2], sampling: TextureSampling) -> [u8; 3] {
    let u = wrap_coord(uv[0], sampling.wrap);
    let mut v = wrap_coord(uv[1], sampling.wrap);
    if sampling.flip_v {
        v = 1.0 - v;
    }
    let (w, h) = (tex.width(), tex.height());
    let x = u * f64::from(w);
    let y = v * f64::from(h);
    match sampling.filter {
        TextureFilter::Nearest => {
            let px = (x.floor() as i64).clamp(0, i64::from(w) - 1) as u32;
            let py = (y.floor() as i64).clamp(0, i64::from(h) - 1) as u32;
            tex.pixel(px, py)
        }
        TextureFilter::Bilinear => {
            // Texel centers sit at half-integer positions.
            let (x, y) = (x - 0.5, y - 0.5);
            let (x0, y0) = (x.floor(), y.floor());
            let (fx, fy) = (x - x0, y - y0);
            let xs = [x0 as i64, x0 as i64 + 1].map(|i| texel_index(i, w, sampling.wrap));
            let ys = [y0 as i64, y0 as i64 + 1].map(|i| texel_index(i, h, sampling.wrap));
            let weights = [
                (xs[0], ys[0], (1.0 - fx) * (1.0 - fy)),
                (xs[1], ys[0], fx * (1.0 - fy)),
                (xs[0], ys[1], (1.0 - fx) * fy),
                (xs[1], ys[1], fx * fy),
            ];
            let mut acc = [0.0f64; 3];
            for (px, py, wt) in weights {
                let texel = tex.pixel(px, py);
                for (a, t) in acc.iter_mut().zip(texel) {
                    *a += wt * f64::from(t);
                }
            }
            acc.map(round_channel)
        }
    }
}

/// Color of the surface at barycentric position `bary` on `face`: the
/// material texture when both a texture and UVs exist, otherwise the
/// diffuse color.
pub fn lookup_color(
    mesh: &Mesh,
    face: usize,
    bary: [f64; 3],
    sampling: TextureSampling,
) -> [u8; 3] {
    let material = mesh.material_of(face);
    if let (Some(tex), Some(uv_idx)) = (
        material.and_then(|m| m.texture.as_deref()),
        mesh.faces[face].uv,
    ) {
        let uvs = uv_idx.map(|i| mesh.uvs[i]);
        let uv = [0, 1].map(|k| bary[0] * uvs[0][k] + bary[1] * uvs[1][k] + bary[2] * uvs[2][k]);
        return sample_texture(tex, uv, sampling);
    }
    let diffuse = material.map_or(DEFAULT_DIFFUSE, |m| m.diffuse);
    diffuse.map(|c| round_channel(c * 255.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceSample {
    pub face: usize,
    pub position: DVec3,
    pub barycentric: [f64; 3],
    pub color: [u8; 3],
}

/// Draws `cfg.n_points` area-uniform samples. Sample `i` depends only on
/// `(mesh, cfg, i)`.
pub fn sample_surface(mesh: &Mesh, cfg: &SampleConfig, exec: Exec) -> Result<Vec<SurfaceSample>> {
    if cfg.n_points == 0 {
        return Err(Error::Config("n_points must be at least 1".into()));
    }
    let cdf = build_area_cdf(mesh)?;
    Ok(map_indices(exec, cfg.n_points, |i| {
        let mut rng = KeyedRng::new(cfg.seed, Domain::SurfaceSample, i as u64, 0);
        let face = cdf.pick(rng.unit());
        let (r1, r2) = (rng.unit(), rng.unit());
        let (position, barycentric) = sample_point_on_face(&mesh.triangle(face), r1, r2);
        SurfaceSample {
            face,
            position,
            barycentric,
            color: lookup_color(mesh, face, barycentric, cfg.texture),
        }
    }))
}

pub fn sample_mesh(mesh: &Mesh, cfg: &SampleConfig) -> Result<PointCloud> {
    sample_mesh_with(mesh, cfg, Exec::default())
}

pub fn sample_mesh_with(mesh: &Mesh, cfg: &SampleConfig, exec: Exec) -> Result<PointCloud> {
    let samples = sample_surface(mesh, cfg, exec)?;
    Ok(PointCloud::new(
        samples.iter().map(|s| s.position.to_array()).collect(),
        samples.iter().map(|s| s.color).collect(),
    ))
}
