use std::collections::HashMap;
use std::fs;
use std::io::Read;
use std::path::Path;

use glam::DVec3;
use tracing::warn;

use super::{parse_mtl, Face, Material, Mesh};
use crate::error::{Error, Result};

/// Reads an OBJ file from disk, resolving `mtllib` relative to its directory.
pub fn read_obj(path: &Path) -> Result<Mesh> {
    let file = fs::File::open(path)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_obj(file, base)
}

/// Parses the OBJ subset `v`, `vt`, `f`, `usemtl`, `mtllib`.
///
/// Polygons are fan-triangulated, relative (negative) indices are resolved
/// against the elements seen so far, and every other directive is ignored.
/// Material libraries are loaded from `base_path` once the whole file has
/// been read; a missing library or an unknown `usemtl` name leaves the
/// affected faces without a material.
pub fn parse_obj<R: Read>(mut source: R, base_path: &Path) -> Result<Mesh> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;
    let text = String::from_utf8_lossy(&bytes);

    let mut mesh = Mesh::default();
    let mut libraries: Vec<String> = Vec::new();
    // Faces first refer to an index into `used_names`, remapped at the end.
    let mut used_names: Vec<String> = Vec::new();
    let mut current: Option<usize> = None;

    for (line_index, raw) in text.lines().enumerate() {
        let line_no = line_index + 1;
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let mut tokens = line.split_whitespace();
        let Some(keyword) = tokens.next() else {
            continue;
        };
        match keyword {
            "v" => {
                // Extra components (w, or nonstandard vertex colors) are ignored.
                let [x, y, z] = parse_floats::<3>(&mut tokens, 3, line_no)?;
                mesh.vertices.push(DVec3::new(x, y, z));
            }
            "vt" => {
                let [u, v] = parse_floats::<2>(&mut tokens, 1, line_no)?;
                mesh.uvs.push([u, v]);
            }
            "f" => {
                let corners = tokens
                    .map(|t| parse_corner(t, &mesh, line_no))
                    .collect::<Result<Vec<_>>>()?;
                if corners.len() < 3 {
                    return Err(Error::parse(line_no, "face needs at least 3 vertices"));
                }
                let all_uv = corners.iter().all(|c| c.1.is_some());
                for i in 1..corners.len() - 1 {
                    let tri = [corners[0], corners[i], corners[i + 1]];
                    mesh.faces.push(Face {
                        v: tri.map(|c| c.0),
                        uv: all_uv.then(|| tri.map(|c| c.1.unwrap_or_default())),
                        material: current,
                    });
                }
            }
            "usemtl" => {
                let name = rest_of_line(line, keyword);
                current = Some(match used_names.iter().position(|n| *n == name) {
                    Some(i) => i,
                    None => {
                        used_names.push(name.to_string());
                        used_names.len() - 1
                    }
                });
            }
            "mtllib" => {
                let name = rest_of_line(line, keyword);
                if !name.is_empty() {
                    libraries.push(name.to_string());
                }
            }
            _ => {}
        }
    }

    resolve_materials(&mut mesh, &libraries, &used_names, base_path);
    Ok(mesh)
}

fn rest_of_line<'a>(line: &'a str, keyword: &str) -> &'a str {
    line.trim_start()[keyword.len()..].trim()
}

fn parse_floats<'a, const N: usize>(
    tokens: &mut impl Iterator<Item = &'a str>,
    required: usize,
    line: usize,
) -> Result<[f64; N]> {
    let mut out = [0.0; N];
    for (i, slot) in out.iter_mut().enumerate() {
        match tokens.next() {
            Some(t) => *slot = parse_float(t, line)?,
            None if i < required => {
                return Err(Error::parse(line, format!("expected {required} numbers")))
            }
            None => break,
        }
    }
    Ok(out)
}

fn parse_float(token: &str, line: usize) -> Result<f64> {
    match token.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::parse(line, format!("malformed number {token:?}"))),
    }
}

/// Parses one `v`, `v/vt`, `v//vn` or `v/vt/vn` face corner.
fn parse_corner(token: &str, mesh: &Mesh, line: usize) -> Result<(usize, Option<usize>)> {
    let mut parts = token.split('/');
    let v = parts.next().unwrap_or_default();
    let v = resolve_index(v, mesh.vertices.len(), "vertex", line)?;
    let uv = match parts.next() {
        Some(t) if !t.is_empty() => Some(resolve_index(t, mesh.uvs.len(), "texture", line)?),
        _ => None,
    };
    Ok((v, uv))
}

fn resolve_index(token: &str, count: usize, what: &str, line: usize) -> Result<usize> {
    let raw: i64 = token
        .parse()
        .map_err(|_| Error::parse(line, format!("malformed {what} index {token:?}")))?;
    let resolved = match raw {
        0 => None,
        r if r > 0 => Some(r - 1),
        r => (count as i64).checked_add(r),
    };
    match resolved {
        Some(i) if i >= 0 && (i as usize) < count => Ok(i as usize),
        _ => Err(Error::parse(
            line,
            format!("{what} index {raw} out of range (have {count})"),
        )),
    }
}

fn resolve_materials(mesh: &mut Mesh, libraries: &[String], used: &[String], base: &Path) {
    let mut materials: Vec<Material> = Vec::new();
    for lib in libraries {
        let path = base.join(lib.replace('\\', "/"));
        match fs::File::open(&path) {
            Ok(file) => {
                let lib_base = path.parent().unwrap_or(base);
                match parse_mtl(file, lib_base) {
                    Ok(found) => materials.extend(found),
                    Err(e) => warn!("material library {}: {e}", path.display()),
                }
            }
            Err(e) => warn!("material library {}: {e}", path.display()),
        }
    }

    let mut by_name: HashMap<&str, usize> = HashMap::new();
    for (i, m) in materials.iter().enumerate() {
        by_name.entry(m.name.as_str()).or_insert(i);
    }
    let remap: Vec<Option<usize>> = used
        .iter()
        .map(|name| {
            let found = by_name.get(name.as_str()).copied();
            if found.is_none() {
                warn!("material {name:?} not found; using default gray");
            }
            found
        })
        .collect();
    for face in &mut mesh.faces {
        face.material = face.material.and_then(|i| remap[i]);
    }
    mesh.materials = materials;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Mesh> {
        parse_obj(text.as_bytes(), Path::new("/nonexistent"))
    }

    const TRI: &str = "v 0 0 0\nv 1 0 0\nv 0 1 0\n";

    #[test]
    fn minimal_triangle() {
        let mesh = parse(&format!("{TRI}f 1 2 3\n")).unwrap();
        assert_eq!(mesh.vertices.len(), 3);
        assert_eq!(mesh.faces.len(), 1);
        assert_eq!(mesh.faces[0].v, [0, 1, 2]);
        assert!(mesh.materials.is_empty());
    }

    #[test]
    fn quad_is_fan_triangulated() {
        let mesh = parse("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n").unwrap();
        let faces: Vec<_> = mesh.faces.iter().map(|f| f.v).collect();
        assert_eq!(faces, vec![[0, 1, 2], [0, 2, 3]]);
    }

    #[test]
    fn relative_indices() {
        let mesh = parse(&format!("{TRI}f -3 -2 -1\n")).unwrap();
        assert_eq!(mesh.faces[0].v, [0, 1, 2]);
    }

    #[test]
    fn slash_forms() {
        let text = format!("{TRI}vt 0 0\nvt 1 0\nvt 0 1\nvn 0 0 1\nf 1/1/1 2/2/1 3/3/1\nf 1//1 2//1 3//1\n");
        let mesh = parse(&text).unwrap();
        assert_eq!(mesh.faces[0].uv, Some([0, 1, 2]));
        assert_eq!(mesh.faces[1].uv, None);
    }

    #[test]
    fn vertex_colors_and_unknown_directives_ignored() {
        let mesh = parse("o thing\ns off\nv 0 0 0 1 0 0\nv 1 0 0 1 0 0\nv 0 1 0 1 0 0\ng grp\nf 1 2 3\n").unwrap();
        assert_eq!(mesh.vertices[1], DVec3::new(1.0, 0.0, 0.0));
        assert_eq!(mesh.faces.len(), 1);
    }

    #[test]
    fn malformed_number_reports_line() {
        match parse("v 0 0 0\nv 1 x 0\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse("v nan 0 0\n").is_err());
    }

    #[test]
    fn out_of_range_index() {
        assert!(matches!(parse(&format!("{TRI}f 1 2 4\n")), Err(Error::Parse { line: 4, .. })));
        assert!(parse(&format!("{TRI}f 0 1 2\n")).is_err());
        assert!(parse(&format!("{TRI}f -4 1 2\n")).is_err());
        assert!(parse(&format!("{TRI}vt 0 0\nf 1/2 2/1 3/1\n")).is_err());
    }

    #[test]
    fn missing_mtl_gives_untextured_faces() {
        let mesh = parse(&format!("mtllib nope.mtl\nusemtl red\n{TRI}f 1 2 3\n")).unwrap();
        assert!(mesh.materials.is_empty());
        assert_eq!(mesh.faces[0].material, None);
    }

    #[test]
    fn usemtl_resolves_through_library() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("m.mtl"), "newmtl a\nKd 1 0 0\nnewmtl b\nKd 0 0 1\n").unwrap();
        let text = format!("mtllib m.mtl\n{TRI}usemtl b\nf 1 2 3\nusemtl missing\nf 1 2 3\nusemtl a\nf 1 2 3\n");
        let mesh = parse_obj(text.as_bytes(), dir.path()).unwrap();
        assert_eq!(mesh.materials.len(), 2);
        let mats: Vec<_> = mesh.faces.iter().map(|f| f.material).collect();
        assert_eq!(mats, vec![Some(1), None, Some(0)]);
    }
}
