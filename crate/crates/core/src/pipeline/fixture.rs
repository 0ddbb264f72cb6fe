//! Small OBJ scenes whose correct output is known by construction.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixtureKind {
    /// Unit cube: 12 outward red triangles plus the same 12 triangles with
    /// reversed winding in blue.
    DoubledCube,
    /// Green cube of side 1 centered inside a red cube of side 2.
    NestedCubes,
    /// Unit square of two triangles mapped onto a 2x2 checker texture.
    TexturedQuad,
}

impl FixtureKind {
    pub const ALL: [FixtureKind; 3] = [
        FixtureKind::DoubledCube,
        FixtureKind::NestedCubes,
        FixtureKind::TexturedQuad,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FixtureKind::DoubledCube => "doubled_cube",
            FixtureKind::NestedCubes => "nested_cubes",
            FixtureKind::TexturedQuad => "textured_quad",
        }
    }
}

impl FromStr for FixtureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FixtureKind::ALL
            .into_iter()
            .find(|k| k.name() == s.replace('-', "_"))
            .ok_or_else(|| Error::Config(format!("unknown fixture {s:?}")))
    }
}

/// Outward-wound quads of an axis-aligned cube, as corner indices
/// `x + 2y + 4z`.
const CUBE_QUADS: [[usize; 4]; 6] = [
    [0, 2, 3, 1], // -z
    [4, 5, 7, 6], // +z
    [0, 1, 5, 4], // -y
    [2, 6, 7, 3], // +y
    [0, 4, 6, 2], // -x
    [1, 3, 7, 5], // +x
];

fn cube_vertices(min: f64, size: f64) -> Vec<[f64; 3]> {
    (0..8)
        .map(|i| {
            let bit = |b: usize| min + size * ((i >> b) & 1) as f64;
            [bit(0), bit(1), bit(2)]
        })
        .collect()
}

/// 12 outward triangles, zero-based, offset by `base`.
fn cube_triangles(base: usize) -> Vec<[usize; 3]> {
    CUBE_QUADS
        .iter()
        .flat_map(|&[a, b, c, d]| [[a, b, c], [a, c, d]])
        .map(|t| t.map(|i| i + base))
        .collect()
}

fn push_vertices(obj: &mut String, verts: &[[f64; 3]]) {
    for [x, y, z] in verts {
        writeln!(obj, "v {x} {y} {z}").unwrap();
    }
}

fn push_faces(obj: &mut String, tris: &[[usize; 3]]) {
    for t in tris {
        writeln!(obj, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1).unwrap();
    }
}

/// Writes `<name>.obj`, `<name>.mtl` and any texture into `out`, returning
/// the OBJ path.
pub fn generate_fixture(kind: FixtureKind, out: &Path) -> Result<PathBuf> {
    fs::create_dir_all(out)?;
    let name = kind.name();
    let mut obj = format!("# {name} fixture\nmtllib {name}.mtl\n");
    let mtl;
    match kind {
        FixtureKind::DoubledCube => {
            mtl = "newmtl red\nKd 1 0 0\nnewmtl blue\nKd 0 0 1\n".to_string();
            push_vertices(&mut obj, &cube_vertices(0.0, 1.0));
            let outward = cube_triangles(0);
            let inward: Vec<_> = outward.iter().map(|&[a, b, c]| [a, c, b]).collect();
            obj.push_str("usemtl red\n");
            push_faces(&mut obj, &outward);
            obj.push_str("usemtl blue\n");
            push_faces(&mut obj, &inward);
        }
        FixtureKind::NestedCubes => {
            mtl = "newmtl red\nKd 1 0 0\nnewmtl green\nKd 0 1 0\n".to_string();
            push_vertices(&mut obj, &cube_vertices(0.0, 2.0));
            push_vertices(&mut obj, &cube_vertices(0.5, 1.0));
            obj.push_str("usemtl red\n");
            push_faces(&mut obj, &cube_triangles(0));
            obj.push_str("usemtl green\n");
            push_faces(&mut obj, &cube_triangles(8));
        }
        FixtureKind::TexturedQuad => {
            mtl = "newmtl checker\nKd 1 1 1\nmap_Kd checker.png\n".to_string();
            // Row 0 (v = 1): white, black. Row 1 (v = 0): black, white.
            let pixels = vec![255, 255, 255, 0, 0, 0, 0, 0, 0, 255, 255, 255];
            image::RgbImage::from_raw(2, 2, pixels)
                .expect("2x2 buffer")
                .save(out.join("checker.png"))
                .map_err(|e| Error::Io(std::io::Error::other(e)))?;
            push_vertices(&mut obj, &[[0., 0., 0.], [1., 0., 0.], [1., 1., 0.], [0., 1., 0.]]);
            obj.push_str("vt 0 0\nvt 1 0\nvt 1 1\nvt 0 1\nusemtl checker\n");
            obj.push_str("f 1/1 2/2 3/3\nf 1/1 3/3 4/4\n");
        }
    }
    fs::write(out.join(format!("{name}.mtl")), mtl)?;
    let path = out.join(format!("{name}.obj"));
    fs::write(&path, obj)?;
    Ok(path)
}
