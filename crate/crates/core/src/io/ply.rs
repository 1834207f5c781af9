//! Minimal PLY reader and writer for vertex-only point clouds.
//!
//! Reads ascii and binary little-endian files with any scalar vertex
//! properties; `x`, `y`, `z` are required, `category` and `plane_id` are
//! picked up when present. Writes float32 coordinates plus optional
//! `category`, `red`/`green`/`blue` and `plane_id` properties.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::plane_color;
use crate::{Category, Error, LabeledCloud, Point3, Result};

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
    fn parse(name: &str) -> Option<Self> {
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
            Scalar::I8 => b[0] as i8 as f64,
            Scalar::U8 => b[0] as f64,
            Scalar::I16 => i16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::U16 => u16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::I32 => i32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            Scalar::U32 => u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            Scalar::F32 => f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            Scalar::F64 => f64::from_le_bytes(b[..8].try_into().expect("8 bytes")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Encoding {
    Ascii,
    BinaryLe,
}

#[derive(Debug)]
struct Header {
    encoding: Encoding,
    vertex_count: usize,
    properties: Vec<(String, Scalar)>,
}

/// Contents of a PLY file.
#[derive(Debug, Clone, Default)]
pub struct PlyData {
    pub cloud: LabeledCloud,
    /// Per-point plane id when the file has a `plane_id` property; negative
    /// ids read as unassigned.
    pub plane_ids: Option<Vec<Option<u32>>>,
}

pub fn read_ply(path: &Path) -> Result<PlyData> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    let (header, header_bytes, header_lines) = read_header(&mut reader)?;
    let find = |name: &str| header.properties.iter().position(|(n, _)| n == name);
    let missing = |axis: &str| Error::parse("ply", "header", format!("missing vertex property `{axis}`"));
    let ix = find("x").ok_or_else(|| missing("x"))?;
    let iy = find("y").ok_or_else(|| missing("y"))?;
    let iz = find("z").ok_or_else(|| missing("z"))?;
    let icat = find("category");
    let iplane = find("plane_id");

    let n = header.vertex_count;
    let mut points = Vec::with_capacity(n);
    let mut labels = icat.map(|_| Vec::with_capacity(n));
    let mut plane_ids = iplane.map(|_| Vec::with_capacity(n));
    let mut values = vec![0.0f64; header.properties.len()];

    let record_size: usize = header.properties.iter().map(|(_, s)| s.size()).sum();
    let mut record = vec![0u8; record_size];
    let mut line = String::new();
    for v in 0..n {
        let location = match header.encoding {
            Encoding::Ascii => format!("line {}", header_lines + v + 1),
            Encoding::BinaryLe => format!("byte {}", header_bytes + v * record_size),
        };
        match header.encoding {
            Encoding::Ascii => {
                line.clear();
                let read = reader.read_line(&mut line).map_err(|e| Error::io(path, e))?;
                if read == 0 {
                    return Err(Error::parse("ply", location, "unexpected end of file"));
                }
                let mut tokens = line.split_whitespace();
                for slot in values.iter_mut() {
                    let tok = tokens
                        .next()
                        .ok_or_else(|| Error::parse("ply", &location, "too few values"))?;
                    *slot = tok
                        .parse::<f64>()
                        .map_err(|e| Error::parse("ply", &location, format!("`{tok}`: {e}")))?;
                }
            }
            Encoding::BinaryLe => {
                reader
                    .read_exact(&mut record)
                    .map_err(|_| Error::parse("ply", &location, "unexpected end of file"))?;
                let mut offset = 0;
                for (slot, (_, ty)) in values.iter_mut().zip(&header.properties) {
                    *slot = ty.decode_le(&record[offset..]);
                    offset += ty.size();
                }
            }
        }
        let p = Point3::new(values[ix], values[iy], values[iz]);
        if !p.coords.iter().all(|c| c.is_finite()) {
            return Err(Error::parse("ply", location, "non-finite coordinate"));
        }
        points.push(p);
        if let (Some(labels), Some(ic)) = (labels.as_mut(), icat) {
            let raw = values[ic];
            let cat = Category::from_u8(raw as u8)
                .filter(|_| raw == 0.0 || raw == 1.0)
                .ok_or_else(|| Error::parse("ply", &location, format!("category must be 0 or 1, got {raw}")))?;
            labels.push(cat);
        }
        if let (Some(ids), Some(ip)) = (plane_ids.as_mut(), iplane) {
            let raw = values[ip];
            ids.push(if raw < 0.0 { None } else { Some(raw as u32) });
        }
    }
    let cloud = LabeledCloud::new(points)?;
    let cloud = match labels {
        Some(l) => cloud.replace_labels(l)?,
        None => cloud,
    };
    Ok(PlyData { cloud, plane_ids })
}

fn read_header(reader: &mut impl BufRead) -> Result<(Header, usize, usize)> {
    let mut bytes = 0usize;
    let mut lineno = 0usize;
    let mut buf = Vec::new();
    let mut encoding = None;
    let mut vertex_count = None;
    let mut properties = Vec::new();
    // element currently being described, and whether it is the vertex element
    let mut in_vertex = false;
    loop {
        buf.clear();
        let read = reader
            .read_until(b'\n', &mut buf)
            .map_err(|e| Error::parse("ply", format!("line {}", lineno + 1), e))?;
        if read == 0 {
            return Err(Error::parse("ply", format!("line {}", lineno + 1), "missing end_header"));
        }
        bytes += read;
        lineno += 1;
        let location = format!("line {lineno}");
        let text = std::str::from_utf8(&buf)
            .map_err(|_| Error::parse("ply", &location, "header is not valid UTF-8"))?
            .trim();
        let mut words = text.split_whitespace();
        let keyword = words.next().unwrap_or("");
        if lineno == 1 {
            if text != "ply" {
                return Err(Error::parse("ply", location, "missing `ply` magic"));
            }
            continue;
        }
        match keyword {
            "format" => {
                encoding = Some(match words.next() {
                    Some("ascii") => Encoding::Ascii,
                    Some("binary_little_endian") => Encoding::BinaryLe,
                    other => {
                        return Err(Error::parse("ply", location, format!("unsupported format {other:?}")));
                    }
                });
            }
            "comment" | "obj_info" | "" => {}
            "element" => {
                let name = words.next().unwrap_or("");
                let count: usize = words
                    .next()
                    .and_then(|c| c.parse().ok())
                    .ok_or_else(|| Error::parse("ply", &location, "bad element count"))?;
                if name == "vertex" {
                    vertex_count = Some(count);
                    in_vertex = true;
                } else {
                    if vertex_count.is_none() && count > 0 {
                        return Err(Error::parse("ply", location, "vertex must be the first element"));
                    }
                    in_vertex = false;
                }
            }
            "property" => {
                if !in_vertex {
                    continue;
                }
                let ty = words.next().unwrap_or("");
                if ty == "list" {
                    return Err(Error::parse("ply", location, "list properties on vertices are not supported"));
                }
                let scalar = Scalar::parse(ty)
                    .ok_or_else(|| Error::parse("ply", &location, format!("unknown type `{ty}`")))?;
                let name = words
                    .next()
                    .ok_or_else(|| Error::parse("ply", &location, "property without a name"))?;
                properties.push((name.to_string(), scalar));
            }
            "end_header" => break,
            other => return Err(Error::parse("ply", location, format!("unexpected keyword `{other}`"))),
        }
    }
    let encoding = encoding.ok_or_else(|| Error::parse("ply", "header", "missing format line"))?;
    let vertex_count = vertex_count.ok_or_else(|| Error::parse("ply", "header", "missing vertex element"))?;
    Ok((
        Header {
            encoding,
            vertex_count,
            properties,
        },
        bytes,
        lineno,
    ))
}

pub fn write_ply(cloud: &LabeledCloud, assignment: Option<&[Option<u32>]>, path: &Path, binary: bool) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_ply_to(&mut w, cloud, assignment, binary)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

fn write_ply_to(
    w: &mut impl Write,
    cloud: &LabeledCloud,
    assignment: Option<&[Option<u32>]>,
    binary: bool,
) -> std::io::Result<()> {
    let labels = cloud.labels();
    writeln!(w, "ply")?;
    writeln!(w, "format {} 1.0", if binary { "binary_little_endian" } else { "ascii" })?;
    writeln!(w, "comment written by planeseg")?;
    writeln!(w, "element vertex {}", cloud.len())?;
    for axis in ["x", "y", "z"] {
        writeln!(w, "property float {axis}")?;
    }
    if labels.is_some() {
        writeln!(w, "property uchar category")?;
    }
    if assignment.is_some() {
        writeln!(w, "property uchar red")?;
        writeln!(w, "property uchar green")?;
        writeln!(w, "property uchar blue")?;
        writeln!(w, "property int plane_id")?;
    }
    writeln!(w, "end_header")?;

    for (i, p) in cloud.points().iter().enumerate() {
        let xyz = [p.x as f32, p.y as f32, p.z as f32];
        let category = labels.map(|l| l[i].as_u8());
        let plane = assignment.map(|a| a[i]);
        if binary {
            for c in xyz {
                w.write_all(&c.to_le_bytes())?;
            }
            if let Some(c) = category {
                w.write_all(&[c])?;
            }
            if let Some(id) = plane {
                w.write_all(&plane_color(id))?;
                w.write_all(&id.map_or(-1, |v| v as i32).to_le_bytes())?;
            }
        } else {
            write!(w, "{} {} {}", xyz[0], xyz[1], xyz[2])?;
            if let Some(c) = category {
                write!(w, " {c}")?;
            }
            if let Some(id) = plane {
                let [r, g, b] = plane_color(id);
                write!(w, " {r} {g} {b} {}", id.map_or(-1, |v| v as i32))?;
            }
            writeln!(w)?;
        }
    }
    Ok(())
}
