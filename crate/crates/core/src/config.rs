//! Segmenter configuration and its `key = value` text form.

use std::fmt::Write as _;
use std::path::Path;

use crate::{Error, Result, Vector3};

/// Deepest octree supported; leaf coordinates are kept in 32-bit integers.
pub const MAX_OCTREE_DEPTH: u32 = 20;

const UNIT_TOLERANCE: f64 = 1e-9;

/// All thresholds and structural parameters of the segmenter.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmenterConfig {
    /// Maximum number of minority-label points a node may hold and still be
    /// conquered.
    pub theta_n_out: usize,
    /// Maximum minority-label fraction of a conquerable node, in `[0, 1]`.
    pub theta_r_out: f64,
    /// Minimum number of majority-label points needed to fit a plane.
    pub theta_n_in: usize,
    /// Upper bound on the residual scatter along the fitted normal, m².
    pub theta_e_n: f64,
    /// Minimum normal alignment of coplanar planes, in `(0, 1)`.
    pub theta_coplane: f64,
    /// Residual points closer than this to a plane join it, m.
    pub residual_distance: f64,
    /// Edge length of the octree root cube, m.
    pub octree_extent: f64,
    pub octree_max_depth: u32,
    pub voxel_size: f64,
    /// Neighborhood size for normal estimation.
    pub classify_k: usize,
    /// Unit baseline vector for the inclination test.
    pub gravity: Vector3,
}

impl Default for SegmenterConfig {
    fn default() -> Self {
        Self {
            theta_n_out: 5,
            theta_r_out: 0.05,
            theta_n_in: 5,
            theta_e_n: 0.005,
            theta_coplane: 0.85,
            residual_distance: 0.005,
            octree_extent: 3.2,
            octree_max_depth: 7,
            voxel_size: 0.02,
            classify_k: 16,
            gravity: Vector3::z(),
        }
    }
}

pub fn default_config() -> SegmenterConfig {
    SegmenterConfig::default()
}

fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidConfig {
        field,
        reason: reason.into(),
    }
}

fn positive(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("must be a positive finite number, got {value}")))
    }
}

impl SegmenterConfig {
    /// Checks every field, reporting the first violation.
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.theta_r_out) {
            return Err(invalid(
                "theta_r_out",
                format!("must lie in [0, 1], got {}", self.theta_r_out),
            ));
        }
        if self.theta_n_in == 0 {
            return Err(invalid("theta_n_in", "must be at least 1"));
        }
        positive("theta_e_n", self.theta_e_n)?;
        if !(self.theta_coplane > 0.0 && self.theta_coplane < 1.0) {
            return Err(invalid(
                "theta_coplane",
                format!("must lie in (0, 1), got {}", self.theta_coplane),
            ));
        }
        positive("residual_distance", self.residual_distance)?;
        positive("octree_extent", self.octree_extent)?;
        if self.octree_max_depth == 0 || self.octree_max_depth > MAX_OCTREE_DEPTH {
            return Err(invalid(
                "octree_max_depth",
                format!("must lie in [1, {MAX_OCTREE_DEPTH}], got {}", self.octree_max_depth),
            ));
        }
        positive("voxel_size", self.voxel_size)?;
        if self.classify_k < 3 {
            return Err(invalid(
                "classify_k",
                format!("normal estimation needs at least 3 neighbors, got {}", self.classify_k),
            ));
        }
        let norm = self.gravity.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOLERANCE {
            return Err(invalid("gravity", format!("must be a unit vector, norm is {norm}")));
        }
        Ok(())
    }

    /// Parses the `key = value` form. Missing keys keep their defaults; unknown
    /// keys are rejected. The result is validated.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let location = format!("line {}", lineno + 1);
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse("config", &location, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |e: &dyn std::fmt::Display| Error::parse("config", &location, format!("{key}: {e}"));
            match key {
                "theta_n_out" => cfg.theta_n_out = value.parse().map_err(|e| bad(&e))?,
                "theta_r_out" => cfg.theta_r_out = value.parse().map_err(|e| bad(&e))?,
                "theta_n_in" => cfg.theta_n_in = value.parse().map_err(|e| bad(&e))?,
                "theta_e_n" => cfg.theta_e_n = value.parse().map_err(|e| bad(&e))?,
                "theta_coplane" => cfg.theta_coplane = value.parse().map_err(|e| bad(&e))?,
                "residual_distance" => cfg.residual_distance = value.parse().map_err(|e| bad(&e))?,
                "octree_extent" => cfg.octree_extent = value.parse().map_err(|e| bad(&e))?,
                "octree_max_depth" => cfg.octree_max_depth = value.parse().map_err(|e| bad(&e))?,
                "voxel_size" => cfg.voxel_size = value.parse().map_err(|e| bad(&e))?,
                "classify_k" => cfg.classify_k = value.parse().map_err(|e| bad(&e))?,
                "gravity" => cfg.gravity = parse_vector(value).map_err(|e| bad(&e))?,
                _ => return Err(Error::parse("config", &location, format!("unknown key `{key}`"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Serializes to the `key = value` form. Floats use the shortest
    /// representation that parses back to the same value.
    pub fn to_text(&self) -> String {
        let mut s = String::from("# planeseg segmenter configuration (SI units)\n");
        let g = &self.gravity;
        let _ = writeln!(s, "theta_n_out = {}", self.theta_n_out);
        let _ = writeln!(s, "theta_r_out = {:?}", self.theta_r_out);
        let _ = writeln!(s, "theta_n_in = {}", self.theta_n_in);
        let _ = writeln!(s, "theta_e_n = {:?}", self.theta_e_n);
        let _ = writeln!(s, "theta_coplane = {:?}", self.theta_coplane);
        let _ = writeln!(s, "residual_distance = {:?}", self.residual_distance);
        let _ = writeln!(s, "octree_extent = {:?}", self.octree_extent);
        let _ = writeln!(s, "octree_max_depth = {}", self.octree_max_depth);
        let _ = writeln!(s, "voxel_size = {:?}", self.voxel_size);
        let _ = writeln!(s, "classify_k = {}", self.classify_k);
        let _ = writeln!(s, "gravity = {:?}, {:?}, {:?}", g.x, g.y, g.z);
        s
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

/// Parses `x, y, z` (commas and/or whitespace as separators).
pub fn parse_vector(text: &str) -> std::result::Result<Vector3, String> {
    let parts: Vec<&str> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect();
    if parts.len() != 3 {
        return Err(format!("expected 3 components, got {}", parts.len()));
    }
    let mut v = [0.0; 3];
    for (slot, part) in v.iter_mut().zip(&parts) {
        *slot = part.parse::<f64>().map_err(|e| format!("`{part}`: {e}"))?;
    }
    Ok(Vector3::from(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_published_settings() {
        let c = default_config();
        assert_eq!(c.theta_n_out, 5);
        assert_eq!(c.theta_r_out, 0.05);
        assert_eq!(c.theta_n_in, 5);
        assert_eq!(c.theta_e_n, 0.005);
        assert_eq!(c.theta_coplane, 0.85);
        assert_eq!(c.residual_distance, 0.005);
        assert_eq!(c.octree_extent, 3.2);
        assert_eq!(c.voxel_size, 0.02);
        assert_eq!(c.octree_max_depth, 7);
        assert_eq!(c.classify_k, 16);
        assert_eq!(c.gravity, Vector3::z());
        c.validate().unwrap();
    }

    fn field_of(err: Error) -> &'static str {
        match err {
            Error::InvalidConfig { field, .. } => field,
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn rejects_out_of_range_fields() {
        let c = SegmenterConfig {
            theta_r_out: 1.5,
            ..Default::default()
        };
        assert_eq!(field_of(c.validate().unwrap_err()), "theta_r_out");

        let c = SegmenterConfig {
            gravity: Vector3::new(0.0, 0.0, 2.0),
            ..Default::default()
        };
        assert_eq!(field_of(c.validate().unwrap_err()), "gravity");

        let c = SegmenterConfig {
            theta_coplane: 1.0,
            ..Default::default()
        };
        assert_eq!(field_of(c.validate().unwrap_err()), "theta_coplane");

        let c = SegmenterConfig {
            theta_n_out: 0,
            ..Default::default()
        };
        c.validate().unwrap();
    }

    #[test]
    fn parses_comments_and_partial_files() {
        let cfg = SegmenterConfig::parse(
            "# tuned for a noisier sensor\ntheta_e_n = 0.01  # m^2\n\ngravity = 0, 0, -1\n",
        )
        .unwrap();
        assert_eq!(cfg.theta_e_n, 0.01);
        assert_eq!(cfg.gravity, Vector3::new(0.0, 0.0, -1.0));
        assert_eq!(cfg.theta_n_in, 5);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = SegmenterConfig::parse("theta_n_in = 5\nbogus = 1\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let err = SegmenterConfig::parse("theta_r_out = 2\n").unwrap_err();
        assert_eq!(field_of(err), "theta_r_out");
    }
}
