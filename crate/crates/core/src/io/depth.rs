use std::path::Path;

use crate::{Error, LabeledCloud, Point3, Result};

/// Pinhole camera parameters, in pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
}

/// A depth image in meters, row-major; 0 marks an invalid pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthFrame {
    width: usize,
    height: usize,
    depth: Vec<f64>,
    intrinsics: CameraIntrinsics,
    max_range: f64,
}

impl DepthFrame {
    pub fn new(
        width: usize,
        height: usize,
        depth: Vec<f64>,
        intrinsics: CameraIntrinsics,
        max_range: f64,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument("depth frame must have positive size".into()));
        }
        if depth.len() != width * height {
            return Err(Error::LengthMismatch {
                expected: width * height,
                actual: depth.len(),
            });
        }
        let CameraIntrinsics { fx, fy, cx, cy } = intrinsics;
        if !(fx.is_finite() && fy.is_finite() && fx > 0.0 && fy > 0.0 && cx.is_finite() && cy.is_finite()) {
            return Err(Error::InvalidArgument(format!("invalid intrinsics {intrinsics:?}")));
        }
        if !(max_range > 0.0) {
            return Err(Error::InvalidArgument(format!("max_range must be positive, got {max_range}")));
        }
        if let Some(i) = depth.iter().position(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::InvalidArgument(format!("bad depth value at pixel {i}")));
        }
        Ok(Self {
            width,
            height,
            depth,
            intrinsics,
            max_range,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn depth(&self) -> &[f64] {
        &self.depth
    }

    pub fn intrinsics(&self) -> CameraIntrinsics {
        self.intrinsics
    }

    pub fn max_range(&self) -> f64 {
        self.max_range
    }
}

/// Camera-frame points for every pixel with `0 < d <= max_range`, in
/// row-major pixel order.
pub fn backproject(frame: &DepthFrame) -> LabeledCloud {
    let CameraIntrinsics { fx, fy, cx, cy } = frame.intrinsics;
    let mut points = Vec::new();
    for v in 0..frame.height {
        for u in 0..frame.width {
            let d = frame.depth[v * frame.width + u];
            if d > 0.0 && d <= frame.max_range {
                points.push(Point3::new(d * (u as f64 - cx) / fx, d * (v as f64 - cy) / fy, d));
            }
        }
    }
    LabeledCloud::new(points).expect("finite by construction")
}

/// Loads a 16-bit grayscale PNG holding millimeters and a key-value sidecar
/// with `fx`, `fy`, `cx`, `cy` and `max_range` (meters).
pub fn load_depth_frame(png: &Path, intrinsics: &Path) -> Result<DepthFrame> {
    let text = std::fs::read_to_string(intrinsics).map_err(|e| Error::io(intrinsics, e))?;
    let mut values: [Option<f64>; 5] = [None; 5];
    const KEYS: [&str; 5] = ["fx", "fy", "cx", "cy", "max_range"];
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let location = format!("line {}", lineno + 1);
        let (key, value) = line
            .split_once(|c| c == '=' || c == ':' || c == ' ')
            .ok_or_else(|| Error::parse("intrinsics", &location, "expected `key = value`"))?;
        let key = key.trim();
        let slot = KEYS
            .iter()
            .position(|k| *k == key)
            .ok_or_else(|| Error::parse("intrinsics", &location, format!("unknown key `{key}`")))?;
        let value = value.trim().trim_start_matches(['=', ':']).trim();
        values[slot] = Some(
            value
                .parse()
                .map_err(|e| Error::parse("intrinsics", &location, format!("`{value}`: {e}")))?,
        );
    }
    let get = |i: usize| values[i].ok_or_else(|| Error::parse("intrinsics", "file", format!("missing `{}`", KEYS[i])));
    let cam = CameraIntrinsics {
        fx: get(0)?,
        fy: get(1)?,
        cx: get(2)?,
        cy: get(3)?,
    };
    let max_range = get(4)?;

    let img = image::ImageReader::open(png)
        .map_err(|e| Error::io(png, e))?
        .decode()?
        .into_luma16();
    let (w, h) = img.dimensions();
    let depth = img.into_raw().into_iter().map(|mm| mm as f64 / 1000.0).collect();
    DepthFrame::new(w as usize, h as usize, depth, cam, max_range)
}
