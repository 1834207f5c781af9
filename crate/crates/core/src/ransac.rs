//! Sequential RANSAC plane extraction, the comparison baseline.
//!
//! Each round draws `max_iterations` three-point hypotheses from the points
//! not yet claimed, keeps the one with the most inliers, refits it by PCA and
//! removes its inliers. Extraction stops when the best hypothesis of a round
//! has fewer than `min_plane_points` inliers.

use std::time::Instant;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::segmenter::{fit_plane_pca, SegmentationResult, StageTimings};
use crate::{Error, LabeledCloud, Plane, Point3, Result, Vector3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RansacConfig {
    /// Inlier distance threshold in meters.
    pub theta_pf: f64,
    pub max_iterations: usize,
    pub min_plane_points: usize,
    pub seed: u64,
}

impl Default for RansacConfig {
    fn default() -> Self {
        Self {
            theta_pf: 0.01,
            max_iterations: 1000,
            min_plane_points: 50,
            seed: 0,
        }
    }
}

impl RansacConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |field, reason: &str| {
            Err(Error::InvalidConfig {
                field,
                reason: reason.to_string(),
            })
        };
        if !(self.theta_pf.is_finite() && self.theta_pf > 0.0) {
            return bad("theta_pf", "must be positive");
        }
        if self.max_iterations == 0 {
            return bad("max_iterations", "must be at least 1");
        }
        if self.min_plane_points < 3 {
            return bad("min_plane_points", "must be at least 3");
        }
        Ok(())
    }
}

/// Refits beyond this many grow steps stop growing and only shrink.
const MAX_REFITS: usize = 10;

pub fn ransac_segment(cloud: &LabeledCloud, cfg: &RansacConfig) -> Result<SegmentationResult> {
    cfg.validate()?;
    if cloud.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            actual: cloud.len(),
        });
    }
    let start = Instant::now();
    let pts = cloud.points();
    let gravity = Vector3::z();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut remaining: Vec<u32> = (0..pts.len() as u32).collect();
    let mut planes = Vec::new();

    while remaining.len() >= cfg.min_plane_points {
        let hypotheses: Vec<(Vector3, f64)> = (0..cfg.max_iterations)
            .filter_map(|_| {
                let s = sample(&mut rng, remaining.len(), 3);
                let [a, b, c] = [0, 1, 2].map(|k| pts[remaining[s.index(k)] as usize]);
                let n = (b - a).cross(&(c - a));
                let norm = n.norm();
                // skip collinear triples
                (norm > 1e-12).then(|| {
                    let n = n / norm;
                    (n, n.dot(&a.coords))
                })
            })
            .collect();
        let best = hypotheses
            .par_iter()
            .enumerate()
            .map(|(k, (n, d))| (count_inliers(pts, &remaining, n, *d, cfg.theta_pf), k))
            .max_by_key(|&(count, k)| (count, std::cmp::Reverse(k)));
        let Some((count, k)) = best else { break };
        if count < cfg.min_plane_points {
            break;
        }
        let (n, d) = hypotheses[k];
        let Some(plane) = refine(pts, &remaining, n, d, cfg.theta_pf, &gravity) else {
            break;
        };
        if plane.count() < cfg.min_plane_points {
            break;
        }
        let taken: std::collections::HashSet<u32> = plane.point_indices().iter().copied().collect();
        remaining.retain(|i| !taken.contains(i));
        planes.push(plane);
    }

    let timings = StageTimings {
        traverse: start.elapsed(),
        ..Default::default()
    };
    Ok(SegmentationResult::from_planes(planes, pts.len(), timings))
}

fn count_inliers(pts: &[Point3], candidates: &[u32], n: &Vector3, d: f64, theta: f64) -> usize {
    candidates
        .iter()
        .filter(|&&i| (n.dot(&pts[i as usize].coords) - d).abs() <= theta)
        .count()
}

fn inliers(pts: &[Point3], candidates: &[u32], n: &Vector3, d: f64, theta: f64) -> Vec<u32> {
    candidates
        .iter()
        .copied()
        .filter(|&i| (n.dot(&pts[i as usize].coords) - d).abs() <= theta)
        .collect()
}

fn plane_params(plane: &Plane) -> (Vector3, f64) {
    (*plane.normal(), plane.normal().dot(&plane.centroid().coords))
}

/// Refits the hypothesis by PCA until its inlier set stops changing, then
/// drops any points the final fit leaves outside the threshold, so every
/// member of the returned plane lies within `theta` of it.
fn refine(pts: &[Point3], remaining: &[u32], n: Vector3, d: f64, theta: f64, gravity: &Vector3) -> Option<Plane> {
    let mut set = inliers(pts, remaining, &n, d, theta);
    let mut plane = fit_plane_pca(pts, &set, gravity).ok()?;
    for _ in 0..MAX_REFITS {
        let (n, d) = plane_params(&plane);
        let next = inliers(pts, remaining, &n, d, theta);
        if next == set {
            return Some(plane);
        }
        set = next;
        plane = fit_plane_pca(pts, &set, gravity).ok()?;
    }
    loop {
        let (n, d) = plane_params(&plane);
        let kept = inliers(pts, &set, &n, d, theta);
        if kept.len() == set.len() {
            return Some(plane);
        }
        set = kept;
        plane = fit_plane_pca(pts, &set, gravity).ok()?;
    }
}
