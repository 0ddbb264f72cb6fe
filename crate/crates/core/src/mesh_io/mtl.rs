use std::collections::HashMap;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use tracing::warn;

use super::{load_texture, Material, TextureImage, DEFAULT_DIFFUSE};
use crate::error::{Error, Result};

/// Parses `newmtl`, `Kd` and `map_Kd` from an MTL library.
///
/// Texture paths are resolved against `base_path`. A texture that cannot be
/// loaded is logged and the material keeps its `Kd` color.
pub fn parse_mtl<R: Read>(mut source: R, base_path: &Path) -> Result<Vec<Material>> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;
    let text = String::from_utf8_lossy(&bytes);

    let mut materials: Vec<Material> = Vec::new();
    let mut cache: HashMap<PathBuf, Option<Arc<TextureImage>>> = HashMap::new();

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
            "newmtl" => {
                let name = line.trim_start()[keyword.len()..].trim();
                materials.push(Material::untextured(name, DEFAULT_DIFFUSE));
            }
            "Kd" => {
                let Some(current) = materials.last_mut() else {
                    return Err(Error::parse(line_no, "Kd before newmtl"));
                };
                let values = tokens
                    .map(|t| {
                        t.parse::<f64>()
                            .ok()
                            .filter(|v| v.is_finite())
                            .ok_or_else(|| Error::parse(line_no, format!("malformed number {t:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                // `Kd r` alone means a gray level.
                let rgb = match values.as_slice() {
                    [g] => [*g; 3],
                    [r, g, b, ..] => [*r, *g, *b],
                    _ => return Err(Error::parse(line_no, "Kd needs 1 or 3 numbers")),
                };
                current.diffuse = rgb.map(|c| c.clamp(0.0, 1.0));
            }
            "map_Kd" => {
                let Some(current) = materials.last_mut() else {
                    return Err(Error::parse(line_no, "map_Kd before newmtl"));
                };
                let args: Vec<&str> = tokens.collect();
                let Some(file) = texture_file_name(&args) else {
                    warn!("line {line_no}: map_Kd without a file name");
                    continue;
                };
                let path = base_path.join(file.replace('\\', "/"));
                let texture = cache
                    .entry(path.clone())
                    .or_insert_with(|| match load_texture(&path) {
                        Ok(img) => Some(Arc::new(img)),
                        Err(e) => {
                            warn!("{e}; falling back to Kd");
                            None
                        }
                    })
                    .clone();
                current.texture = texture;
            }
            _ => {}
        }
    }
    Ok(materials)
}

/// Strips `map_Kd` options (`-s 1 1 1`, `-clamp on`, ...) and returns the
/// remaining file name, which may contain spaces.
fn texture_file_name(args: &[&str]) -> Option<String> {
    let mut i = 0;
    while i < args.len() && args[i].starts_with('-') {
        let max_args = match args[i] {
            "-o" | "-s" | "-t" => 3,
            "-mm" => 2,
            "-blendu" | "-blendv" | "-boost" | "-cc" | "-clamp" | "-imfchan" | "-texres"
            | "-bm" | "-type" => 1,
            _ => 0,
        };
        i += 1;
        let mut taken = 0;
        while taken < max_args && i < args.len() {
            let is_value = match max_args {
                // Numeric options take a variable count of numbers.
                2 | 3 => args[i].parse::<f64>().is_ok(),
                _ => true,
            };
            if !is_value {
                break;
            }
            i += 1;
            taken += 1;
        }
    }
    (i < args.len()).then(|| args[i..].join(" "))
}
