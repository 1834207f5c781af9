//! Fixed-extent octree over labeled points.
//!
//! Every node on a point's insertion path keeps the point's index together
//! with per-category counts, so any node can be analyzed without descending
//! to its leaves. Octant `i` of a node selects the high half along x for bit 0,
//! y for bit 1 and z for bit 2. Cells are half-open on their max side except
//! for the root's max faces.

use std::fmt::Write as _;

use crate::{Category, Error, LabeledCloud, Point3, Result, SegmenterConfig};

pub type NodeId = u32;

#[derive(Debug, Clone)]
pub struct OctreeNode {
    pub depth: u32,
    pub bounds_min: Point3,
    pub bounds_max: Point3,
    pub children: [Option<NodeId>; 8],
    pub parent: Option<NodeId>,
    pub count_h: usize,
    pub count_v: usize,
    /// Octant digits from the root, one per level.
    pub path: Vec<u8>,
    pub point_indices: Vec<u32>,
}

impl OctreeNode {
    fn new(depth: u32, bounds_min: Point3, size: f64, parent: Option<NodeId>, path: Vec<u8>) -> Self {
        Self {
            depth,
            bounds_min,
            bounds_max: bounds_min + crate::Vector3::repeat(size),
            children: [None; 8],
            parent,
            count_h: 0,
            count_v: 0,
            path,
            point_indices: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.point_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.point_indices.is_empty()
    }

    pub fn edge(&self) -> f64 {
        self.bounds_max.x - self.bounds_min.x
    }

    pub fn path_string(&self) -> String {
        let mut s = String::from("r");
        for d in &self.path {
            s.push((b'0' + d) as char);
        }
        s
    }
}

#[derive(Debug, Clone)]
pub struct Octree {
    nodes: Vec<OctreeNode>,
    max_depth: u32,
    extent: f64,
    origin: Point3,
    dropped: usize,
}

impl Octree {
    /// Inserts every labeled point of `cloud` into a cube of edge
    /// `cfg.octree_extent` centered on the cloud's bounding box.
    pub fn build(cloud: &LabeledCloud, cfg: &SegmenterConfig) -> Result<Self> {
        if cloud.is_empty() {
            return Err(Error::EmptyCloud);
        }
        let (lo, hi) = bounding_box(cloud.points());
        let center = nalgebra::center(&lo, &hi);
        let origin = center - crate::Vector3::repeat(cfg.octree_extent / 2.0);
        Self::build_with_origin(cloud, cfg, origin)
    }

    /// Same as [`Octree::build`] with an explicit root min corner.
    pub fn build_with_origin(cloud: &LabeledCloud, cfg: &SegmenterConfig, origin: Point3) -> Result<Self> {
        if cloud.is_empty() {
            return Err(Error::EmptyCloud);
        }
        let labels = cloud.labels().ok_or(Error::Unlabeled)?;
        let extent = cfg.octree_extent;
        if !(extent.is_finite() && extent > 0.0) {
            return Err(Error::InvalidConfig {
                field: "octree_extent",
                reason: format!("must be positive, got {extent}"),
            });
        }
        let max_depth = cfg.octree_max_depth;
        if max_depth == 0 || max_depth > crate::config::MAX_OCTREE_DEPTH {
            return Err(Error::InvalidConfig {
                field: "octree_max_depth",
                reason: format!("unsupported depth {max_depth}"),
            });
        }
        let mut tree = Self {
            nodes: vec![OctreeNode::new(0, origin, extent, None, Vec::new())],
            max_depth,
            extent,
            origin,
            dropped: 0,
        };
        for (i, (p, &label)) in cloud.points().iter().zip(labels).enumerate() {
            match tree.leaf_coords(p) {
                Some(cell) => tree.insert(i as u32, label, cell),
                None => tree.dropped += 1,
            }
        }
        Ok(tree)
    }

    /// Integer leaf coordinates of `p`, or `None` when it lies outside the
    /// root cube.
    fn leaf_coords(&self, p: &Point3) -> Option<[u32; 3]> {
        let cells = 1u64 << self.max_depth;
        let leaf = self.leaf_edge();
        let mut out = [0u32; 3];
        for axis in 0..3 {
            let lo = self.origin[axis];
            let hi = lo + self.extent;
            let x = p[axis];
            if !(x >= lo && x <= hi) {
                return None;
            }
            let mut i = (((x - lo) / leaf).floor() as i64).clamp(0, cells as i64 - 1);
            // nudge so that the cell test below holds exactly in floating point
            while i > 0 && lo + i as f64 * leaf > x {
                i -= 1;
            }
            while i + 1 < cells as i64 && lo + (i + 1) as f64 * leaf <= x {
                i += 1;
            }
            out[axis] = i as u32;
        }
        Some(out)
    }

    fn insert(&mut self, index: u32, label: Category, cell: [u32; 3]) {
        let mut node = 0usize;
        for depth in 0..=self.max_depth {
            {
                let n = &mut self.nodes[node];
                n.point_indices.push(index);
                match label {
                    Category::H => n.count_h += 1,
                    Category::V => n.count_v += 1,
                }
            }
            if depth == self.max_depth {
                break;
            }
            let shift = self.max_depth - depth - 1;
            let octant = (((cell[0] >> shift) & 1) | (((cell[1] >> shift) & 1) << 1) | (((cell[2] >> shift) & 1) << 2)) as usize;
            node = match self.nodes[node].children[octant] {
                Some(child) => child as usize,
                None => {
                    let child_depth = depth + 1;
                    let size = self.extent / (1u64 << child_depth) as f64;
                    let j = |axis: usize| (cell[axis] >> (self.max_depth - child_depth)) as f64;
                    let min = Point3::new(
                        self.origin.x + j(0) * size,
                        self.origin.y + j(1) * size,
                        self.origin.z + j(2) * size,
                    );
                    let mut path = self.nodes[node].path.clone();
                    path.push(octant as u8);
                    let id = self.nodes.len() as NodeId;
                    self.nodes.push(OctreeNode::new(child_depth, min, size, Some(node as NodeId), path));
                    self.nodes[node].children[octant] = Some(id);
                    id as usize
                }
            };
        }
    }

    pub fn root(&self) -> &OctreeNode {
        &self.nodes[0]
    }

    pub fn root_id(&self) -> NodeId {
        0
    }

    pub fn node(&self, id: NodeId) -> &OctreeNode {
        &self.nodes[id as usize]
    }

    pub fn nodes(&self) -> &[OctreeNode] {
        &self.nodes
    }

    pub fn max_depth(&self) -> u32 {
        self.max_depth
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn origin(&self) -> &Point3 {
        &self.origin
    }

    pub fn leaf_edge(&self) -> f64 {
        self.extent / (1u64 << self.max_depth) as f64
    }

    /// Number of input points that fell outside the root cube.
    pub fn dropped(&self) -> usize {
        self.dropped
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        self.nodes[id as usize].children.iter().all(Option::is_none)
    }

    /// Occupied children in octant order. Leaves have none.
    pub fn children_of(&self, id: NodeId) -> Vec<NodeId> {
        self.nodes[id as usize].children.iter().flatten().copied().collect()
    }

    /// Coordinates of the node's points in insertion order.
    pub fn node_points(&self, id: NodeId, cloud: &LabeledCloud) -> Vec<Point3> {
        let pts = cloud.points();
        self.nodes[id as usize]
            .point_indices
            .iter()
            .map(|&i| pts[i as usize])
            .collect()
    }

    /// One line per occupied node in breadth-first octant order:
    /// `depth path count_h count_v`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let mut queue = std::collections::VecDeque::from([self.root_id()]);
        while let Some(id) = queue.pop_front() {
            let n = self.node(id);
            let _ = writeln!(out, "{} {} {} {}", n.depth, n.path_string(), n.count_h, n.count_v);
            queue.extend(self.children_of(id));
        }
        out
    }
}

pub(crate) fn bounding_box(points: &[Point3]) -> (Point3, Point3) {
    let mut lo = Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut hi = -lo;
    for p in points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labeled(points: Vec<Point3>) -> LabeledCloud {
        let n = points.len();
        LabeledCloud::with_labels(points, vec![Category::H; n]).unwrap()
    }

    #[test]
    fn single_point_makes_one_chain() {
        let cfg = SegmenterConfig::default();
        let tree = Octree::build(&labeled(vec![Point3::new(0.3, -0.2, 1.0)]), &cfg).unwrap();
        assert_eq!(tree.root().len(), 1);
        assert_eq!(tree.nodes().len(), cfg.octree_max_depth as usize + 1);
        let mut id = tree.root_id();
        let mut depth = 0;
        while !tree.is_leaf(id) {
            let kids = tree.children_of(id);
            assert_eq!(kids.len(), 1);
            id = kids[0];
            depth += 1;
        }
        assert_eq!(depth, cfg.octree_max_depth);
    }

    #[test]
    fn opposite_corners_use_octants_zero_and_seven() {
        let cfg = SegmenterConfig::default();
        let cloud = labeled(vec![Point3::new(-1.0, -1.0, -1.0), Point3::new(1.0, 1.0, 1.0)]);
        let tree = Octree::build(&cloud, &cfg).unwrap();
        let root = tree.root();
        assert!(root.children[0].is_some() && root.children[7].is_some());
        assert_eq!(tree.children_of(0).len(), 2);
    }

    #[test]
    fn root_max_face_is_closed() {
        let cfg = SegmenterConfig {
            octree_max_depth: 2,
            octree_extent: 4.0,
            ..Default::default()
        };
        let cloud = labeled(vec![Point3::new(4.0, 4.0, 4.0), Point3::new(0.0, 0.0, 0.0)]);
        let tree = Octree::build_with_origin(&cloud, &cfg, Point3::origin()).unwrap();
        assert_eq!(tree.dropped(), 0);
        let top = tree.node(tree.root().children[7].unwrap());
        assert_eq!(top.point_indices, vec![0]);
        // just past the cube is dropped
        let cloud = labeled(vec![Point3::new(4.0 + 1e-9, 1.0, 1.0), Point3::new(1.0, 1.0, 1.0)]);
        let tree = Octree::build_with_origin(&cloud, &cfg, Point3::origin()).unwrap();
        assert_eq!(tree.dropped(), 1);
        assert_eq!(tree.root().len(), 1);
    }

    #[test]
    fn half_open_boundaries_go_high() {
        let cfg = SegmenterConfig {
            octree_max_depth: 1,
            octree_extent: 2.0,
            ..Default::default()
        };
        let cloud = labeled(vec![Point3::new(1.0, 0.5, 0.5)]);
        let tree = Octree::build_with_origin(&cloud, &cfg, Point3::origin()).unwrap();
        assert!(tree.root().children[1].is_some());
    }

    #[test]
    fn unlabeled_and_empty_are_rejected() {
        let cfg = SegmenterConfig::default();
        assert!(matches!(Octree::build(&LabeledCloud::default(), &cfg), Err(Error::EmptyCloud)));
        let cloud = LabeledCloud::new(vec![Point3::origin()]).unwrap();
        assert!(matches!(Octree::build(&cloud, &cfg), Err(Error::Unlabeled)));
    }

    #[test]
    fn dump_lists_every_node() {
        let cfg = SegmenterConfig {
            octree_max_depth: 2,
            ..Default::default()
        };
        let cloud = labeled(vec![Point3::new(-1.0, -1.0, -1.0), Point3::new(1.0, 1.0, 1.0)]);
        let tree = Octree::build(&cloud, &cfg).unwrap();
        let dump = tree.dump();
        assert_eq!(dump.lines().count(), tree.nodes().len());
        assert_eq!(dump.lines().next(), Some("0 r 2 0"));
        assert!(dump.contains("2 r77 1 0"));
    }
}
