use std::fmt::Write as _;
use std::path::Path;

use crate::{Error, Plane, Point3, Result, Vector3};

/// Per-plane summary stored next to a segmented cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneRecord {
    pub normal: Vector3,
    pub centroid: Point3,
    pub count: usize,
}

impl From<&Plane> for PlaneRecord {
    fn from(p: &Plane) -> Self {
        Self {
            normal: *p.normal(),
            centroid: *p.centroid(),
            count: p.count(),
        }
    }
}

/// A `planes P` line, then one `id nx ny nz cx cy cz count` row per plane.
pub fn planes_to_text(planes: &[PlaneRecord]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "planes {}", planes.len());
    for (i, p) in planes.iter().enumerate() {
        let (n, c) = (p.normal, p.centroid);
        let _ = writeln!(
            s,
            "{i} {:?} {:?} {:?} {:?} {:?} {:?} {}",
            n.x, n.y, n.z, c.x, c.y, c.z, p.count
        );
    }
    s
}

pub fn parse_planes(text: &str) -> Result<Vec<PlaneRecord>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (lineno, header) = lines
        .next()
        .ok_or_else(|| Error::parse("planes", "end of file", "expected `planes <count>`"))?;
    let n: usize = header
        .strip_prefix("planes")
        .and_then(|r| r.trim().parse().ok())
        .ok_or_else(|| Error::parse("planes", format!("line {lineno}"), "expected `planes <count>`"))?;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let (lineno, line) = lines
            .next()
            .ok_or_else(|| Error::parse("planes", "end of file", format!("expected plane {i}")))?;
        let bad = || Error::parse("planes", format!("line {lineno}"), "expected `id nx ny nz cx cy cz count`");
        let tok: Vec<&str> = line.split_whitespace().collect();
        if tok.len() != 8 || tok[0].parse::<usize>().ok() != Some(i) {
            return Err(bad());
        }
        let v: Vec<f64> = tok[1..7]
            .iter()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        if !v.iter().all(|x| x.is_finite()) {
            return Err(bad());
        }
        out.push(PlaneRecord {
            normal: Vector3::new(v[0], v[1], v[2]),
            centroid: Point3::new(v[3], v[4], v[5]),
            count: tok[7].parse().map_err(|_| bad())?,
        });
    }
    if let Some((lineno, _)) = lines.next() {
        return Err(Error::parse("planes", format!("line {lineno}"), "unexpected trailing data"));
    }
    Ok(out)
}

pub fn write_planes(planes: &[PlaneRecord], path: &Path) -> Result<()> {
    std::fs::write(path, planes_to_text(planes)).map_err(|e| Error::io(path, e))
}

pub fn read_planes(path: &Path) -> Result<Vec<PlaneRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_planes(&text)
}
