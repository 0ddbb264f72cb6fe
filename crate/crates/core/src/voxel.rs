//! Fit a cloud into an `R`-cube, snap it to the integer grid and merge the
//! points that land in the same cell.

use glam::DVec3;

use crate::error::{Error, Result};
use crate::exec::{map_indices, sort_unstable_by_key, Exec};
use crate::geometry::Aabb;
use crate::mesh_io::PointCloud;

/// Aspect-preserving map from model space into `[0, R-1]^3`:
/// `p' = (p - origin) * scale + shift`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridTransform {
    pub scale: f64,
    /// Minimum corner of the cloud's bounding box.
    pub origin: DVec3,
    /// Centers the shorter axes inside the cube; zero on the longest axis.
    pub shift: DVec3,
    pub resolution: u32,
}

impl GridTransform {
    #[inline]
    pub fn apply(&self, p: DVec3) -> DVec3 {
        (p - self.origin) * self.scale + self.shift
    }
}

pub fn compute_transform(cloud: &PointCloud, resolution: u32) -> Result<GridTransform> {
    if resolution < 2 {
        return Err(Error::Config(format!("resolution {resolution} is below 2")));
    }
    let bounds = Aabb::from_points(cloud.points.iter().map(|p| DVec3::from_array(*p)))
        .ok_or(Error::EmptyInput)?;
    let span = f64::from(resolution - 1);
    let extent = bounds.extent();
    let max_extent = extent.max_element();
    // Coincident points: any scale works, the shift alone centers them.
    let scale = if max_extent > 0.0 { span / max_extent } else { 1.0 };
    Ok(GridTransform {
        scale,
        origin: bounds.min,
        shift: (DVec3::splat(span) - extent * scale) / 2.0,
        resolution,
    })
}

pub fn voxelize(cloud: &PointCloud, resolution: u32) -> Result<PointCloud> {
    voxelize_with(cloud, resolution, Exec::default())
}

/// Round-half-up quantization followed by an equal-weight color mean per
/// cell (also rounded half up). Output is sorted by `(x, y, z)`.
pub fn voxelize_with(cloud: &PointCloud, resolution: u32, exec: Exec) -> Result<PointCloud> {
    if cloud.is_empty() {
        return Err(Error::EmptyInput);
    }
    let transform = compute_transform(cloud, resolution)?;
    let max = f64::from(resolution - 1);
    let mut cells: Vec<([u32; 3], [u8; 3])> = map_indices(exec, cloud.len(), |i| {
        let p = transform.apply(DVec3::from_array(cloud.points[i]));
        let q = p.to_array().map(|c| (c + 0.5).floor().clamp(0.0, max) as u32);
        (q, cloud.colors[i])
    });
    sort_unstable_by_key(exec, &mut cells, |c| c.0);

    let mut out = PointCloud {
        grid_resolution: Some(resolution),
        ..PointCloud::default()
    };
    for run in cells.chunk_by(|a, b| a.0 == b.0) {
        let n = run.len() as u64;
        let mut sum = [0u64; 3];
        for (_, c) in run {
            for (s, &v) in sum.iter_mut().zip(c) {
                *s += u64::from(v);
            }
        }
        out.points.push(run[0].0.map(f64::from));
        out.colors.push(sum.map(|s| ((2 * s + n) / (2 * n)) as u8));
    }
    Ok(out)
}
