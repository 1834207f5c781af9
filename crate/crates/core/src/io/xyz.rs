use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::{Error, LabeledCloud, Point3, Result};

/// Reads whitespace-separated `x y z` triples, one point per line. Blank lines
/// and `#` comments are skipped; extra columns are ignored.
pub fn read_xyz(path: &Path) -> Result<LabeledCloud> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut points = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let location = format!("line {}", lineno + 1);
        let mut v = [0.0f64; 3];
        let mut tokens = line.split_whitespace();
        for slot in &mut v {
            let tok = tokens
                .next()
                .ok_or_else(|| Error::parse("xyz", &location, "expected three coordinates"))?;
            *slot = tok
                .parse()
                .map_err(|e| Error::parse("xyz", &location, format!("`{tok}`: {e}")))?;
        }
        if !v.iter().all(|c| c.is_finite()) {
            return Err(Error::parse("xyz", location, "non-finite coordinate"));
        }
        points.push(Point3::from(v));
    }
    LabeledCloud::new(points)
}

pub fn write_xyz(cloud: &LabeledCloud, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let res: std::io::Result<()> = (|| {
        for p in cloud.points() {
            writeln!(w, "{:?} {:?} {:?}", p.x, p.y, p.z)?;
        }
        w.flush()
    })();
    res.map_err(|e| Error::io(path, e))
}
