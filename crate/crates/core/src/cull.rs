//! Grouping of coincident faces and removal of the hidden members.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::ao::FaceQuality;
use crate::error::{Error, Result};
use crate::mesh_io::Mesh;

/// Quantization step for positional keys, relative to the mesh diagonal.
pub const POSITION_STEP_FRACTION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DuplicateMode {
    /// Same set of vertex indices.
    ByIndex,
    /// Same set of (quantized) vertex positions.
    #[default]
    ByPosition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CullPolicy {
    /// Keep the best face per group, then drop every zero-quality face.
    #[default]
    Full,
    /// Only resolve duplicate groups.
    DuplicatesOnly,
    /// Leave the mesh untouched.
    Off,
}

/// Winding-independent identity of a face's footprint in space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FaceKey {
    Index([usize; 3]),
    Position([[i64; 3]; 3]),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DuplicateGroup {
    pub key: FaceKey,
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CullReport {
    /// Groups with two or more members.
    pub groups_found: usize,
    /// Non-best members of multi-member groups that were dropped.
    pub faces_removed: usize,
    /// Groups whose best quality was shared, decided by lowest face index.
    pub kept_by_tie_break: usize,
    /// Faces dropped for having zero quality (full policy only).
    pub invisible_removed: usize,
}

/// Partitions the faces into groups of equal key. Groups are ordered by
/// their first member, members by face index.
pub fn find_duplicate_groups(mesh: &Mesh, mode: DuplicateMode) -> Vec<DuplicateGroup> {
    let step = mesh
        .bounds()
        .map(|b| b.diagonal() * POSITION_STEP_FRACTION)
        .filter(|s| *s > 0.0)
        .unwrap_or(1.0);
    let key_of = |face: usize| -> FaceKey {
        let v = mesh.faces[face].v;
        match mode {
            DuplicateMode::ByIndex => {
                let mut k = v;
                k.sort_unstable();
                FaceKey::Index(k)
            }
            DuplicateMode::ByPosition => {
                let mut k = v.map(|i| {
                    mesh.vertices[i]
                        .to_array()
                        .map(|c| (c / step).round() as i64)
                });
                k.sort_unstable();
                FaceKey::Position(k)
            }
        }
    };

    let mut slot: HashMap<FaceKey, usize> = HashMap::with_capacity(mesh.face_count());
    let mut groups: Vec<DuplicateGroup> = Vec::new();
    for face in 0..mesh.face_count() {
        let key = key_of(face);
        let g = *slot.entry(key).or_insert_with(|| {
            groups.push(DuplicateGroup {
                key,
                members: Vec::new(),
            });
            groups.len() - 1
        });
        groups[g].members.push(face);
    }
    groups
}

/// Keeps the highest-quality member of each group (lowest index on ties) and,
/// under [`CullPolicy::Full`], also drops every face whose quality is zero.
/// Surviving faces keep their relative order; vertices are untouched.
pub fn cull_internal_faces(
    mesh: &Mesh,
    quality: &FaceQuality,
    groups: &[DuplicateGroup],
    policy: CullPolicy,
) -> Result<(Mesh, CullReport)> {
    if quality.values.len() != mesh.face_count() {
        return Err(Error::Config(format!(
            "{} quality values for {} faces",
            quality.values.len(),
            mesh.face_count()
        )));
    }
    let mut report = CullReport::default();
    if policy == CullPolicy::Off {
        return Ok((mesh.clone(), report));
    }

    let q = &quality.values;
    let mut keep = vec![true; mesh.face_count()];
    for group in groups.iter().filter(|g| g.members.len() > 1) {
        report.groups_found += 1;
        report.faces_removed += group.members.len() - 1;
        let best = group
            .members
            .iter()
            .copied()
            .reduce(|best, f| if q[f] > q[best] || (q[f] == q[best] && f < best) { f } else { best })
            .expect("group has members");
        if group.members.iter().filter(|&&f| q[f] == q[best]).count() > 1 {
            report.kept_by_tie_break += 1;
        }
        for &f in &group.members {
            keep[f] = f == best;
        }
    }
    if policy == CullPolicy::Full {
        for (f, k) in keep.iter_mut().enumerate() {
            if *k && q[f] == 0.0 {
                *k = false;
                report.invisible_removed += 1;
            }
        }
    }
    Ok((mesh.retain_faces(|f| keep[f]), report))
}
