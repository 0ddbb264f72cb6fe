//! PLY point clouds: `x y z` as float32 and `red green blue` as uint8.
//!
//! The reader accepts any scalar property types and skips unknown elements
//! (including list properties) so that PLY files from other tools load too.

use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use super::PointCloud;
use crate::error::{Error, Result};

const GRID_COMMENT: &str = "grid_resolution";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlyEncoding {
    Ascii,
    #[default]
    BinaryLittleEndian,
}

impl PlyEncoding {
    fn header_name(self) -> &'static str {
        match self {
            PlyEncoding::Ascii => "ascii",
            PlyEncoding::BinaryLittleEndian => "binary_little_endian",
        }
    }
}

pub fn write_ply<W: Write>(cloud: &PointCloud, encoding: PlyEncoding, sink: W) -> Result<()> {
    if cloud.points.len() != cloud.colors.len() {
        return Err(Error::Ply("points and colors differ in length".into()));
    }
    let mut out = std::io::BufWriter::new(sink);
    writeln!(out, "ply")?;
    writeln!(out, "format {} 1.0", encoding.header_name())?;
    if let Some(r) = cloud.grid_resolution {
        writeln!(out, "comment {GRID_COMMENT} {r}")?;
    }
    writeln!(out, "element vertex {}", cloud.points.len())?;
    for axis in ["x", "y", "z"] {
        writeln!(out, "property float {axis}")?;
    }
    for channel in ["red", "green", "blue"] {
        writeln!(out, "property uchar {channel}")?;
    }
    writeln!(out, "end_header")?;

    match encoding {
        PlyEncoding::Ascii => {
            for (p, c) in cloud.points.iter().zip(&cloud.colors) {
                // Shortest round-trip form of an f32 never exceeds 9
                // significant digits.
                let [x, y, z] = p.map(|v| v as f32);
                writeln!(out, "{x} {y} {z} {} {} {}", c[0], c[1], c[2])?;
            }
        }
        PlyEncoding::BinaryLittleEndian => {
            let mut record = [0u8; 15];
            for (p, c) in cloud.points.iter().zip(&cloud.colors) {
                for (axis, v) in p.iter().enumerate() {
                    record[axis * 4..axis * 4 + 4].copy_from_slice(&(*v as f32).to_le_bytes());
                }
                record[12..].copy_from_slice(c);
                out.write_all(&record)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Scalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl Scalar {
    fn parse(name: &str) -> Option<Scalar> {
        Some(match name {
            "char" | "int8" => Scalar::I8,
            "uchar" | "uint8" => Scalar::U8,
            "short" | "int16" => Scalar::I16,
            "ushort" | "uint16" => Scalar::U16,
            "int" | "int32" => Scalar::I32,
            "uint" | "uint32" => Scalar::U32,
            "float" | "float32" => Scalar::F32,
            "double" | "float64" => Scalar::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            Scalar::I8 | Scalar::U8 => 1,
            Scalar::I16 | Scalar::U16 => 2,
            Scalar::I32 | Scalar::U32 | Scalar::F32 => 4,
            Scalar::F64 => 8,
        }
    }

    fn decode_le(self, b: &[u8]) -> f64 {
        match self {
            Scalar::I8 => f64::from(b[0] as i8),
            Scalar::U8 => f64::from(b[0]),
            Scalar::I16 => f64::from(i16::from_le_bytes([b[0], b[1]])),
            Scalar::U16 => f64::from(u16::from_le_bytes([b[0], b[1]])),
            Scalar::I32 => f64::from(i32::from_le_bytes([b[0], b[1], b[2], b[3]])),
            Scalar::U32 => f64::from(u32::from_le_bytes([b[0], b[1], b[2], b[3]])),
            Scalar::F32 => f64::from(f32::from_le_bytes([b[0], b[1], b[2], b[3]])),
            Scalar::F64 => f64::from_le_bytes(b[..8].try_into().expect("8 bytes")),
        }
    }

    fn parse_ascii(self, token: &str) -> Option<f64> {
        match self {
            // Round through f32 so ascii and binary agree bit-for-bit.
            Scalar::F32 => token.parse::<f32>().ok().map(f64::from),
            Scalar::F64 => token.parse::<f64>().ok(),
            _ => token.parse::<i64>().ok().map(|v| v as f64),
        }
    }
}

#[derive(Debug, Clone)]
enum Property {
    Scalar { name: String, ty: Scalar },
    List { count: Scalar, item: Scalar },
}

#[derive(Debug, Clone)]
struct Element {
    name: String,
    count: usize,
    properties: Vec<Property>,
}

struct Header {
    binary: bool,
    elements: Vec<Element>,
    grid_resolution: Option<u32>,
}

fn ply_err(msg: impl Into<String>) -> Error {
    Error::Ply(msg.into())
}

fn read_header<R: BufRead>(src: &mut R) -> Result<Header> {
    let mut line = String::new();
    let next_line = |src: &mut R, line: &mut String| -> Result<()> {
        line.clear();
        if src.read_line(line)? == 0 {
            return Err(ply_err("unexpected end of header"));
        }
        Ok(())
    };

    next_line(src, &mut line)?;
    if line.trim_end() != "ply" {
        return Err(ply_err("missing ply magic"));
    }
    let mut binary = None;
    let mut elements: Vec<Element> = Vec::new();
    let mut grid_resolution = None;
    loop {
        next_line(src, &mut line)?;
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("format") => {
                binary = Some(match (tokens.next(), tokens.next()) {
                    (Some("ascii"), Some("1.0")) => false,
                    (Some("binary_little_endian"), Some("1.0")) => true,
                    (Some(other), _) => return Err(ply_err(format!("unsupported format {other}"))),
                    _ => return Err(ply_err("malformed format line")),
                });
            }
            Some("comment") => {
                if tokens.next() == Some(GRID_COMMENT) {
                    grid_resolution = tokens.next().and_then(|t| t.parse().ok());
                }
            }
            Some("obj_info") | None => {}
            Some("element") => {
                let (Some(name), Some(count)) = (tokens.next(), tokens.next()) else {
                    return Err(ply_err("malformed element line"));
                };
                let count = count
                    .parse()
                    .map_err(|_| ply_err(format!("bad element count {count:?}")))?;
                elements.push(Element {
                    name: name.to_string(),
                    count,
                    properties: Vec::new(),
                });
            }
            Some("property") => {
                let element = elements
                    .last_mut()
                    .ok_or_else(|| ply_err("property before element"))?;
                let ty = |t: Option<&str>| {
                    t.and_then(Scalar::parse)
                        .ok_or_else(|| ply_err(format!("bad property type in {:?}", line.trim())))
                };
                let first = tokens.next();
                let property = if first == Some("list") {
                    let count = ty(tokens.next())?;
                    let item = ty(tokens.next())?;
                    if matches!(count, Scalar::F32 | Scalar::F64) {
                        return Err(ply_err("list count must be an integer type"));
                    }
                    Property::List { count, item }
                } else {
                    let ty = ty(first)?;
                    let name = tokens
                        .next()
                        .ok_or_else(|| ply_err("property without a name"))?;
                    Property::Scalar {
                        name: name.to_string(),
                        ty,
                    }
                };
                element.properties.push(property);
            }
            Some("end_header") => break,
            Some(other) => return Err(ply_err(format!("unknown header keyword {other:?}"))),
        }
    }
    Ok(Header {
        binary: binary.ok_or_else(|| ply_err("missing format line"))?,
        elements,
        grid_resolution,
    })
}

/// Source of property values, shared by the ascii and binary bodies.
trait ValueSource {
    fn scalar(&mut self, ty: Scalar) -> Result<f64>;
}

struct AsciiBody<'a> {
    tokens: std::str::SplitAsciiWhitespace<'a>,
}

impl ValueSource for AsciiBody<'_> {
    fn scalar(&mut self, ty: Scalar) -> Result<f64> {
        let token = self
            .tokens
            .next()
            .ok_or_else(|| ply_err("body ended before all records were read"))?;
        ty.parse_ascii(token)
            .ok_or_else(|| ply_err(format!("malformed value {token:?}")))
    }
}

struct BinaryBody<R> {
    src: R,
    buf: [u8; 8],
}

impl<R: Read> ValueSource for BinaryBody<R> {
    fn scalar(&mut self, ty: Scalar) -> Result<f64> {
        let bytes = &mut self.buf[..ty.size()];
        self.src.read_exact(bytes).map_err(|e| match e.kind() {
            std::io::ErrorKind::UnexpectedEof => ply_err("body ended before all records were read"),
            _ => Error::Io(e),
        })?;
        Ok(ty.decode_le(bytes))
    }
}

pub fn read_ply<R: Read>(source: R) -> Result<PointCloud> {
    let mut src = BufReader::new(source);
    let header = read_header(&mut src)?;
    if header.binary {
        read_body(
            &header,
            &mut BinaryBody {
                src,
                buf: [0; 8],
            },
        )
    } else {
        let mut bytes = Vec::new();
        src.read_to_end(&mut bytes)?;
        let text = std::str::from_utf8(&bytes).map_err(|_| ply_err("ascii body is not text"))?;
        read_body(
            &header,
            &mut AsciiBody {
                tokens: text.split_ascii_whitespace(),
            },
        )
    }
}

fn read_body(header: &Header, body: &mut impl ValueSource) -> Result<PointCloud> {
    let vertex = header
        .elements
        .iter()
        .position(|e| e.name == "vertex")
        .ok_or_else(|| ply_err("no vertex element"))?;

    // Column of each wanted property inside a vertex record.
    let slot_of = |name: &str| {
        header.elements[vertex].properties.iter().position(
            |p| matches!(p, Property::Scalar { name: n, .. } if n == name),
        )
    };
    let [x, y, z] = ["x", "y", "z"]
        .map(|n| slot_of(n).ok_or_else(|| ply_err(format!("vertex has no {n} property"))));
    let position_slots = [x?, y?, z?];
    let color_slots = ["red", "green", "blue"].map(slot_of);

    let mut cloud = PointCloud::default();
    let mut record: Vec<f64> = Vec::new();
    for (ei, element) in header.elements.iter().enumerate().take(vertex + 1) {
        if ei == vertex {
            cloud.points.reserve(element.count.min(1 << 24));
            cloud.colors.reserve(element.count.min(1 << 24));
        }
        for _ in 0..element.count {
            record.clear();
            for property in &element.properties {
                match *property {
                    Property::Scalar { ty, .. } => record.push(body.scalar(ty)?),
                    Property::List { count, item } => {
                        let n = body.scalar(count)?;
                        if n < 0.0 {
                            return Err(ply_err("negative list length"));
                        }
                        for _ in 0..n as usize {
                            body.scalar(item)?;
                        }
                        record.push(f64::NAN);
                    }
                }
            }
            if ei == vertex {
                cloud.points.push(position_slots.map(|s| record[s]));
                cloud.colors.push(
                    color_slots.map(|s| s.map_or(0, |s| record[s].round().clamp(0.0, 255.0) as u8)),
                );
            }
        }
    }
    cloud.grid_resolution = header.grid_resolution;
    Ok(cloud)
}
