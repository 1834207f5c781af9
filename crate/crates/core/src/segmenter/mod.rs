//! Divide-and-conquer plane segmentation over the octree.
//!
//! Nodes are visited breadth-first. A node whose minority-label points are too
//! many is divided without fitting anything. A node with too few majority
//! points hands everything to the residual list. Otherwise the majority points
//! are fitted by PCA: a flat fit becomes a plane candidate, a curved one is
//! divided further (or sent to the residual list at a leaf). Candidates merge
//! into the first coplanar plane found, and residual points finally join the
//! nearest plane within `residual_distance`.

mod criteria;
mod fit;

use std::collections::VecDeque;
use std::time::{Duration, Instant};

pub use criteria::{coplanar_ok, min_inliers_ok, plane_candidate_ok, purity_ok, split_inliers};
pub use fit::{fit_plane_pca, merge_planes, point_plane_distance};

use crate::classify::classify_cloud;
use crate::octree::{NodeId, Octree};
use crate::{Category, Error, LabeledCloud, Plane, Point3, Result, SegmenterConfig};

/// Wall-clock time spent in each pipeline stage.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimings {
    pub downsample: Duration,
    pub classify: Duration,
    pub build: Duration,
    pub traverse: Duration,
}

impl StageTimings {
    pub fn total(&self) -> Duration {
        self.downsample + self.classify + self.build + self.traverse
    }
}

/// Outcome of analyzing one octree node.
#[derive(Debug, Clone)]
pub enum NodeVerdict {
    /// Occupied children were queued.
    Divide,
    /// The inliers formed a plane candidate.
    ConquerPlane(Plane),
    /// The node's points went to the residual list.
    Residual,
}

/// One visited node with the quantities its verdict was based on.
#[derive(Debug, Clone)]
pub struct NodeRecord {
    pub node: NodeId,
    pub n_in: usize,
    pub n_out: usize,
    pub majority: Category,
    /// Residual statistic of the inlier fit, when a fit was attempted.
    pub e_n: Option<f64>,
    pub verdict: NodeVerdict,
    /// Minority points set aside when the node was conquered.
    pub outlier_indices: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct SegmentationResult {
    pub planes: Vec<Plane>,
    /// Points that no plane claimed.
    pub residual_indices: Vec<u32>,
    /// Plane id of every input point.
    pub assignment: Vec<Option<u32>>,
    pub timings: StageTimings,
    /// Points outside the octree cube.
    pub dropped: usize,
}

impl SegmentationResult {
    pub fn assigned_count(&self) -> usize {
        self.assignment.iter().filter(|a| a.is_some()).count()
    }

    /// Builds a result from finished planes, filling in the assignment and the
    /// residual list.
    pub fn from_planes(planes: Vec<Plane>, n_points: usize, timings: StageTimings) -> Self {
        let mut assignment = vec![None; n_points];
        for (id, plane) in planes.iter().enumerate() {
            for &i in plane.point_indices() {
                assignment[i as usize] = Some(id as u32);
            }
        }
        let residual_indices = (0..n_points as u32)
            .filter(|&i| assignment[i as usize].is_none())
            .collect();
        Self {
            planes,
            residual_indices,
            assignment,
            timings,
            dropped: 0,
        }
    }
}

/// Where point categories come from before segmentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelSource {
    /// Estimate normals and apply the 45-degree rule.
    Geometric,
    /// Use the labels already attached to the cloud.
    Provided,
    /// Give every point the same label (disables the purity test).
    Uniform,
}

/// Labels the cloud as requested, then segments it. The classification time
/// is recorded in the result's timings.
pub fn run_pipeline(cloud: &LabeledCloud, cfg: &SegmenterConfig, labels: LabelSource) -> Result<SegmentationResult> {
    let start = Instant::now();
    let labeled = match labels {
        LabelSource::Geometric => classify_cloud(cloud, cfg)?,
        LabelSource::Provided => {
            if cloud.labels().is_none() {
                return Err(Error::Unlabeled);
            }
            cloud.clone()
        }
        LabelSource::Uniform => cloud.clone().with_uniform_labels(Category::H),
    };
    let classify = start.elapsed();
    let mut result = segment(&labeled, cfg)?;
    result.timings.classify = classify;
    Ok(result)
}

/// Segments a labeled cloud with the octree centered on its bounding box.
pub fn segment(cloud: &LabeledCloud, cfg: &SegmenterConfig) -> Result<SegmentationResult> {
    segment_impl(cloud, cfg, None, false).map(|(r, _)| r)
}

/// Segments with an explicit octree min corner.
pub fn segment_with_origin(cloud: &LabeledCloud, cfg: &SegmenterConfig, origin: Point3) -> Result<SegmentationResult> {
    segment_impl(cloud, cfg, Some(origin), false).map(|(r, _)| r)
}

/// Segments and also returns the octree and a record of every visited node.
pub fn segment_traced(
    cloud: &LabeledCloud,
    cfg: &SegmenterConfig,
    origin: Option<Point3>,
) -> Result<(SegmentationResult, Trace)> {
    segment_impl(cloud, cfg, origin, true)
}

fn segment_impl(
    cloud: &LabeledCloud,
    cfg: &SegmenterConfig,
    origin: Option<Point3>,
    tracing: bool,
) -> Result<(SegmentationResult, Trace)> {
    cfg.validate()?;
    let labels = cloud.labels().ok_or(Error::Unlabeled)?;

    let start = Instant::now();
    let tree = match origin {
        Some(o) => Octree::build_with_origin(cloud, cfg, o)?,
        None => Octree::build(cloud, cfg)?,
    };
    let build = start.elapsed();

    let start = Instant::now();
    let mut traversal = Traversal::new(cloud, labels, cfg, tracing);
    traversal.run(&tree)?;
    let Traversal {
        planes,
        residual,
        records,
        ..
    } = traversal;
    let mut result = assign_residuals(cloud.points(), planes, residual, cfg);
    let traverse = start.elapsed();

    result.dropped = tree.dropped();
    result.timings.build = build;
    result.timings.traverse = traverse;
    Ok((result, Trace { tree, records }))
}

/// Octree and per-node decisions from a traced segmentation.
#[derive(Debug, Clone)]
pub struct Trace {
    pub tree: Octree,
    pub records: Vec<NodeRecord>,
}

struct Traversal<'a> {
    cloud: &'a LabeledCloud,
    labels: &'a [Category],
    cfg: &'a SegmenterConfig,
    planes: Vec<Plane>,
    residual: Vec<u32>,
    records: Vec<NodeRecord>,
    tracing: bool,
}

impl<'a> Traversal<'a> {
    fn new(cloud: &'a LabeledCloud, labels: &'a [Category], cfg: &'a SegmenterConfig, tracing: bool) -> Self {
        Self {
            tracing,
            cloud,
            labels,
            cfg,
            planes: Vec::new(),
            residual: Vec::new(),
            records: Vec::new(),
        }
    }

    fn run(&mut self, tree: &Octree) -> Result<()> {
        let mut queue = VecDeque::from([tree.root_id()]);
        while let Some(id) = queue.pop_front() {
            let node = tree.node(id);
            let is_leaf = tree.is_leaf(id);
            let (inliers, outliers, majority) = split_inliers(node, self.labels)?;
            let (n_in, n_out) = (inliers.len(), outliers.len());
            let r_out = n_out as f64 / node.len() as f64;
            let mut record = NodeRecord {
                node: id,
                n_in,
                n_out,
                majority,
                e_n: None,
                verdict: NodeVerdict::Residual,
                outlier_indices: Vec::new(),
            };

            if !purity_ok(n_out, r_out, self.cfg) {
                if is_leaf {
                    self.residual.extend_from_slice(&node.point_indices);
                } else {
                    queue.extend(tree.children_of(id));
                    record.verdict = NodeVerdict::Divide;
                }
                self.keep(record);
                continue;
            }
            if !min_inliers_ok(n_in, self.cfg) {
                self.residual.extend_from_slice(&node.point_indices);
                self.keep(record);
                continue;
            }

            // collinear inliers cannot define a plane; treat them as non-planar
            let candidate = fit_plane_pca(self.cloud.points(), &inliers, &self.cfg.gravity).ok();
            record.e_n = candidate.as_ref().map(candidate_error);
            match candidate {
                Some(plane) if plane_candidate_ok(candidate_error(&plane), self.cfg) => {
                    self.residual.extend_from_slice(&outliers);
                    if self.tracing {
                        record.outlier_indices = outliers;
                        record.verdict = NodeVerdict::ConquerPlane(plane.clone());
                    }
                    self.insert_candidate(plane);
                }
                _ if !is_leaf => {
                    queue.extend(tree.children_of(id));
                    record.verdict = NodeVerdict::Divide;
                }
                _ => self.residual.extend_from_slice(&node.point_indices),
            }
            self.keep(record);
        }
        Ok(())
    }

    fn keep(&mut self, record: NodeRecord) {
        if self.tracing {
            self.records.push(record);
        }
    }

    fn insert_candidate(&mut self, candidate: Plane) {
        match self.planes.iter().position(|p| coplanar_ok(p, &candidate, self.cfg)) {
            Some(slot) => self.planes[slot].absorb(&candidate, &self.cfg.gravity),
            None => self.planes.push(candidate),
        }
    }
}

/// Flatness statistic compared against `theta_e_n`: the smallest eigenvalue
/// of the inlier scatter matrix, not divided by the point count.
pub fn candidate_error(plane: &Plane) -> f64 {
    plane.normal_scatter()
}

/// Attaches each residual point to the nearest plane within
/// `residual_distance` (lowest plane id on ties). Distances use the plane
/// parameters after all merging; the joined points are then folded into the
/// plane statistics.
fn assign_residuals(points: &[Point3], mut planes: Vec<Plane>, residual: Vec<u32>, cfg: &SegmenterConfig) -> SegmentationResult {
    let mut assignment = vec![None; points.len()];
    for (id, plane) in planes.iter().enumerate() {
        for &i in plane.point_indices() {
            assignment[i as usize] = Some(id as u32);
        }
    }
    let mut unassigned = Vec::new();
    let mut joined: Vec<Vec<u32>> = vec![Vec::new(); planes.len()];
    for i in residual {
        let p = &points[i as usize];
        let mut best: Option<(f64, usize)> = None;
        for (id, plane) in planes.iter().enumerate() {
            let d = point_plane_distance(p, plane);
            if d <= cfg.residual_distance && best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, id));
            }
        }
        match best {
            Some((_, id)) => {
                assignment[i as usize] = Some(id as u32);
                joined[id].push(i);
            }
            None => unassigned.push(i),
        }
    }
    for (plane, extra) in planes.iter_mut().zip(joined) {
        if !extra.is_empty() {
            plane.absorb_points(points, &extra, &cfg.gravity);
        }
    }
    unassigned.sort_unstable();
    SegmentationResult {
        planes,
        residual_indices: unassigned,
        assignment,
        timings: StageTimings::default(),
        dropped: 0,
    }
}

