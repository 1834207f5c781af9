//! Evaluation against ground truth: directional error α, plane-count ratio
//! r_p and missing-point ratio r_m.
//!
//! Segmented planes are matched to ground truth by plurality vote over their
//! member points, ties going to the lower ground-truth id.

use std::fmt::Write as _;
use std::time::Duration;

use crate::segmenter::{SegmentationResult, StageTimings};
use crate::synth::GroundTruthScene;
use crate::{Error, Result, Vector3};

/// What the metrics need from a segmentation: one normal per plane and the
/// plane id of every point.
#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    pub normals: Vec<Vector3>,
    pub assignment: Vec<Option<u32>>,
}

impl Segmentation {
    pub fn new(normals: Vec<Vector3>, assignment: Vec<Option<u32>>) -> Result<Self> {
        if let Some(bad) = assignment.iter().flatten().find(|&&id| id as usize >= normals.len()) {
            return Err(Error::InvalidArgument(format!(
                "plane id {bad} out of range for {} planes",
                normals.len()
            )));
        }
        Ok(Self { normals, assignment })
    }

    pub fn from_result(result: &SegmentationResult) -> Self {
        Self {
            normals: result.planes.iter().map(|p| *p.normal()).collect(),
            assignment: result.assignment.clone(),
        }
    }

    pub fn plane_count(&self) -> usize {
        self.normals.len()
    }
}

impl From<&SegmentationResult> for Segmentation {
    fn from(r: &SegmentationResult) -> Self {
        Segmentation::from_result(r)
    }
}

fn check_lengths(seg: &Segmentation, gt: &GroundTruthScene) -> Result<()> {
    if seg.assignment.len() != gt.gt_plane_id.len() {
        return Err(Error::LengthMismatch {
            expected: gt.gt_plane_id.len(),
            actual: seg.assignment.len(),
        });
    }
    Ok(())
}

/// Ground-truth plane of each segmented plane, `None` for planes without
/// members.
pub fn match_planes(seg: &Segmentation, gt: &GroundTruthScene) -> Result<Vec<Option<u32>>> {
    check_lengths(seg, gt)?;
    let n_gt = gt.plane_count();
    let mut votes = vec![vec![0usize; n_gt]; seg.plane_count()];
    for (a, &g) in seg.assignment.iter().zip(&gt.gt_plane_id) {
        if let Some(a) = a {
            votes[*a as usize][g as usize] += 1;
        }
    }
    Ok(votes
        .iter()
        .map(|v| {
            // first maximum, so ties keep the lower id
            let (best, &count) = v.iter().enumerate().rev().max_by_key(|(_, c)| **c)?;
            (count > 0).then_some(best as u32)
        })
        .collect())
}

/// Angle between two directions in degrees, ignoring sign.
pub fn unsigned_angle_deg(a: &Vector3, b: &Vector3) -> f64 {
    let c = (a.dot(b).abs() / (a.norm() * b.norm())).min(1.0);
    c.acos().to_degrees()
}

/// Mean unsigned angle between each matched plane's normal and its
/// ground-truth normal, in degrees.
pub fn directional_error(seg: &Segmentation, gt: &GroundTruthScene) -> Result<f64> {
    let matches = match_planes(seg, gt)?;
    let angles: Vec<f64> = matches
        .iter()
        .zip(&seg.normals)
        .filter_map(|(m, n)| m.map(|g| unsigned_angle_deg(n, &gt.gt_normals[g as usize])))
        .collect();
    if angles.is_empty() {
        return Err(Error::NoMatches);
    }
    Ok(angles.iter().sum::<f64>() / angles.len() as f64)
}

pub fn plane_count_ratio(seg: &Segmentation, gt: &GroundTruthScene) -> Result<f64> {
    if gt.plane_count() == 0 {
        return Err(Error::InvalidArgument("ground truth has no planes".into()));
    }
    Ok(100.0 * seg.plane_count() as f64 / gt.plane_count() as f64)
}

pub fn missing_ratio(seg: &Segmentation) -> Result<f64> {
    if seg.assignment.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let missing = seg.assignment.iter().filter(|a| a.is_none()).count();
    Ok(100.0 * missing as f64 / seg.assignment.len() as f64)
}

/// Metrics of one scene. `alpha_deg` is `None` when no plane matched.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneMetrics {
    pub alpha_deg: Option<f64>,
    pub r_p_percent: f64,
    pub r_m_percent: f64,
    pub planes: usize,
    pub gt_planes: usize,
}

pub fn evaluate_scene(seg: &Segmentation, gt: &GroundTruthScene) -> Result<SceneMetrics> {
    check_lengths(seg, gt)?;
    let alpha_deg = match directional_error(seg, gt) {
        Ok(a) => Some(a),
        Err(Error::NoMatches) => None,
        Err(e) => return Err(e),
    };
    Ok(SceneMetrics {
        alpha_deg,
        r_p_percent: plane_count_ratio(seg, gt)?,
        r_m_percent: missing_ratio(seg)?,
        planes: seg.plane_count(),
        gt_planes: gt.plane_count(),
    })
}

/// Mean per-stage durations in milliseconds.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TimingsMs {
    pub downsample: f64,
    pub classify: f64,
    pub build: f64,
    pub segment: f64,
}

impl TimingsMs {
    pub fn total(&self) -> f64 {
        self.downsample + self.classify + self.build + self.segment
    }

    /// Frames per second for a pipeline taking `total()` per frame.
    pub fn fps(&self) -> f64 {
        1000.0 / self.total()
    }

    pub fn mean(timings: &[StageTimings]) -> Self {
        let ms = |f: fn(&StageTimings) -> Duration| {
            timings.iter().map(|t| f(t).as_secs_f64() * 1000.0).sum::<f64>() / timings.len().max(1) as f64
        };
        Self {
            downsample: ms(|t| t.downsample),
            classify: ms(|t| t.classify),
            build: ms(|t| t.build),
            segment: ms(|t| t.traverse),
        }
    }
}

/// Suite-level metrics: every figure is the mean of the per-scene values;
/// α averages over the scenes where at least one plane matched.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub alpha_deg: f64,
    pub r_p_percent: f64,
    pub r_m_percent: f64,
    pub per_scene: Vec<SceneMetrics>,
    pub timings_ms: Option<TimingsMs>,
    pub fps: Option<f64>,
}

impl EvalReport {
    pub fn from_scenes(per_scene: Vec<SceneMetrics>) -> Result<Self> {
        if per_scene.is_empty() {
            return Err(Error::InvalidArgument("no scenes to aggregate".into()));
        }
        let n = per_scene.len() as f64;
        let alphas: Vec<f64> = per_scene.iter().filter_map(|s| s.alpha_deg).collect();
        if alphas.is_empty() {
            return Err(Error::NoMatches);
        }
        Ok(Self {
            alpha_deg: alphas.iter().sum::<f64>() / alphas.len() as f64,
            r_p_percent: per_scene.iter().map(|s| s.r_p_percent).sum::<f64>() / n,
            r_m_percent: per_scene.iter().map(|s| s.r_m_percent).sum::<f64>() / n,
            per_scene,
            timings_ms: None,
            fps: None,
        })
    }

    pub fn with_timings(mut self, timings: &[StageTimings]) -> Self {
        let t = TimingsMs::mean(timings);
        self.fps = Some(t.fps());
        self.timings_ms = Some(t);
        self
    }
}

/// Evaluates matching lists of segmentations and scenes.
pub fn evaluate_suite(segs: &[Segmentation], scenes: &[GroundTruthScene]) -> Result<EvalReport> {
    if segs.len() != scenes.len() {
        return Err(Error::LengthMismatch {
            expected: scenes.len(),
            actual: segs.len(),
        });
    }
    let per_scene = segs
        .iter()
        .zip(scenes)
        .map(|(s, g)| evaluate_scene(s, g))
        .collect::<Result<Vec<_>>>()?;
    EvalReport::from_scenes(per_scene)
}

/// Text table with one column per report and rows α, r_p, r_m.
pub fn format_table(columns: &[(&str, &EvalReport)]) -> String {
    let width = columns.iter().map(|(name, _)| name.len()).max().unwrap_or(0).max(8);
    let mut s = String::new();
    let _ = write!(s, "{:<10}", "metric");
    for (name, _) in columns {
        let _ = write!(s, " {name:>width$}");
    }
    s.push('\n');
    let rows: [(&str, fn(&EvalReport) -> f64); 3] = [
        ("alpha(deg)", |r| r.alpha_deg),
        ("r_p(%)", |r| r.r_p_percent),
        ("r_m(%)", |r| r.r_m_percent),
    ];
    for (label, get) in rows {
        let _ = write!(s, "{label:<10}");
        for (_, report) in columns {
            let _ = write!(s, " {:>width$.2}", get(report));
        }
        s.push('\n');
    }
    s
}

/// CSV with a header row and one row per report.
pub fn format_csv(columns: &[(&str, &EvalReport)]) -> String {
    let mut s = String::from("column,alpha_deg,r_p_percent,r_m_percent,scenes\n");
    for (name, r) in columns {
        let _ = writeln!(
            s,
            "{name},{},{},{},{}",
            r.alpha_deg,
            r.r_p_percent,
            r.r_m_percent,
            r.per_scene.len()
        );
    }
    s
}
