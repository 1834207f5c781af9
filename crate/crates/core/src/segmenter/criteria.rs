//! Node and plane acceptance tests. All comparisons are inclusive at the
//! threshold.

use crate::octree::OctreeNode;
use crate::{Category, Error, Plane, Result, SegmenterConfig};

/// Splits a node's points into the majority-label inliers and the minority
/// outliers. Ties go to `H`.
pub fn split_inliers(node: &OctreeNode, labels: &[Category]) -> Result<(Vec<u32>, Vec<u32>, Category)> {
    if node.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let majority = if node.count_h >= node.count_v {
        Category::H
    } else {
        Category::V
    };
    let (inliers, outliers) = node
        .point_indices
        .iter()
        .partition(|&&i| labels[i as usize] == majority);
    Ok((inliers, outliers, majority))
}

/// Purity: few enough minority-label points, both in count and in ratio.
pub fn purity_ok(n_out: usize, r_out: f64, cfg: &SegmenterConfig) -> bool {
    n_out <= cfg.theta_n_out && r_out <= cfg.theta_r_out
}

pub fn min_inliers_ok(n_in: usize, cfg: &SegmenterConfig) -> bool {
    n_in >= cfg.theta_n_in
}

/// Planarity of a candidate: residual along the normal no larger than
/// `theta_e_n`.
pub fn plane_candidate_ok(e_n: f64, cfg: &SegmenterConfig) -> bool {
    e_n <= cfg.theta_e_n
}

/// Two planes are coplanar when their normals align and the line joining
/// their centroids runs along both planes. Coincident centroids only need
/// aligned normals.
pub fn coplanar_ok(p1: &Plane, p2: &Plane, cfg: &SegmenterConfig) -> bool {
    let (n1, n2) = (p1.normal(), p2.normal());
    if n1.dot(n2).abs() < cfg.theta_coplane {
        return false;
    }
    let offset = p1.centroid() - p2.centroid();
    let dist = offset.norm();
    if dist == 0.0 {
        return true;
    }
    let limit = 1.0 - cfg.theta_coplane;
    (n1.dot(&offset) / dist).abs() <= limit && (n2.dot(&offset) / dist).abs() <= limit
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::octree::Octree;
    use crate::segmenter::fit_plane_pca;
    use crate::{LabeledCloud, Point3, Vector3};

    fn node_with(h: usize, v: usize) -> (OctreeNode, Vec<Category>) {
        let mut labels = vec![Category::H; h];
        labels.extend(vec![Category::V; v]);
        let points = (0..h + v).map(|i| Point3::new(i as f64 * 0.01, 0.0, 0.0)).collect();
        let cloud = LabeledCloud::with_labels(points, labels.clone()).unwrap();
        let tree = Octree::build(&cloud, &SegmenterConfig::default()).unwrap();
        (tree.root().clone(), labels)
    }

    #[test]
    fn majority_split() {
        let (node, labels) = node_with(10, 0);
        let (i, o, m) = split_inliers(&node, &labels).unwrap();
        assert_eq!((i.len(), o.len(), m), (10, 0, Category::H));
        let (node, labels) = node_with(6, 4);
        let (i, o, _) = split_inliers(&node, &labels).unwrap();
        assert_eq!((i.len(), o.len()), (6, 4));
        let (node, labels) = node_with(5, 5);
        assert_eq!(split_inliers(&node, &labels).unwrap().2, Category::H);
        let (node, labels) = node_with(2, 7);
        let (i, o, m) = split_inliers(&node, &labels).unwrap();
        assert_eq!((i.len(), o.len(), m), (7, 2, Category::V));
    }

    #[test]
    fn purity_truth_table() {
        let cfg = SegmenterConfig::default();
        assert!(purity_ok(5, 0.05, &cfg));
        assert!(!purity_ok(6, 0.01, &cfg));
        assert!(!purity_ok(1, 0.050001, &cfg));
        assert!(purity_ok(0, 0.0, &cfg));
    }

    #[test]
    fn min_inliers_truth_table() {
        let cfg = SegmenterConfig::default();
        assert!(min_inliers_ok(5, &cfg));
        assert!(!min_inliers_ok(4, &cfg));
        assert!(min_inliers_ok(10_000, &cfg));
    }

    #[test]
    fn plane_candidate_truth_table() {
        let cfg = SegmenterConfig::default();
        assert!(plane_candidate_ok(0.0, &cfg));
        assert!(plane_candidate_ok(0.005, &cfg));
        assert!(!plane_candidate_ok(0.1, &cfg));
    }

    fn patch(center: Point3, normal: Vector3) -> Plane {
        let normal = normal.normalize();
        let helper = if normal.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
        let u = normal.cross(&helper).normalize();
        let v = normal.cross(&u);
        let pts: Vec<Point3> = [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)]
            .iter()
            .map(|&(a, b)| center + u * (0.1 * a) + v * (0.1 * b))
            .collect();
        fit_plane_pca(&pts, &[0, 1, 2, 3], &Vector3::z()).unwrap()
    }

    #[test]
    fn coplanarity_cases() {
        let cfg = SegmenterConfig::default();
        let a = patch(Point3::new(0.0, 0.0, 0.0), Vector3::z());
        let b = patch(Point3::new(1.0, 0.0, 0.0), Vector3::z());
        assert!(coplanar_ok(&a, &b, &cfg));
        let above = patch(Point3::new(0.0, 0.0, 1.0), Vector3::z());
        assert!(!coplanar_ok(&a, &above, &cfg));
        let tilted = patch(Point3::new(1.0, 0.0, 0.0), Vector3::new(40f64.to_radians().sin(), 0.0, 40f64.to_radians().cos()));
        assert!(!coplanar_ok(&a, &tilted, &cfg));
        // coincident centroids fall back to the normal test
        let same_spot = patch(Point3::origin(), Vector3::new(0.1, 0.0, 1.0));
        assert!(coplanar_ok(&a, &same_spot, &cfg));
    }
}
