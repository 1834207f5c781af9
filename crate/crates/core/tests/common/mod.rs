//! Checks shared by the property tests and the acceptance run. Each returns
//! `Err` with a description of the first violation.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{Matrix3, Rotation3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use planeseg::classify::{classify_cloud, inject_labels};
use planeseg::octree::Octree;
use planeseg::segmenter::{
    coplanar_ok, fit_plane_pca, merge_planes, min_inliers_ok, plane_candidate_ok, point_plane_distance, purity_ok,
    segment_with_origin, SegmentationResult,
};
use planeseg::synth::gen_staircase;
use planeseg::{Category, LabeledCloud, Point3, SegmenterConfig, Vector3};

pub type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

pub fn random_cloud(n: usize, seed: u64) -> LabeledCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (points, labels) = (0..n)
        .map(|_| {
            let p = Point3::new(rng.random_range(-1.4..1.4), rng.random_range(-1.4..1.4), rng.random_range(-1.4..1.4));
            let c = if rng.random_bool(0.5) { Category::H } else { Category::V };
            (p, c)
        })
        .unzip();
    LabeledCloud::with_labels(points, labels).unwrap()
}

/// Occupied nodes keyed by octant path, with their label counts and the
/// original indices of their points.
fn node_map(tree: &Octree, to_original: &[usize]) -> BTreeMap<Vec<u8>, (usize, usize, BTreeSet<usize>)> {
    tree.nodes()
        .iter()
        .map(|n| {
            let pts = n.point_indices.iter().map(|&i| to_original[i as usize]).collect();
            (n.path.clone(), (n.count_h, n.count_v, pts))
        })
        .collect()
}

pub fn octree_permutation_invariance(n: usize, seed: u64) -> Check {
    let cloud = random_cloud(n, seed);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
    for i in (1..n).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    let shuffled = cloud.select(&perm);
    let cfg = SegmenterConfig::default();
    let origin = Point3::new(-1.6, -1.6, -1.6);
    let a = Octree::build_with_origin(&cloud, &cfg, origin).map_err(|e| e.to_string())?;
    let b = Octree::build_with_origin(&shuffled, &cfg, origin).map_err(|e| e.to_string())?;
    let identity: Vec<usize> = (0..n).collect();
    ensure!(node_map(&a, &identity) == node_map(&b, &perm), "octrees differ for n={n} seed={seed}");
    Ok(())
}

pub fn octree_partition(n: usize, seed: u64) -> Check {
    let cloud = random_cloud(n, seed);
    let tree = Octree::build(&cloud, &SegmenterConfig::default()).map_err(|e| e.to_string())?;
    ensure!(tree.root().len() + tree.dropped() == n, "root holds {} of {n} points", tree.root().len());
    for (id, node) in tree.nodes().iter().enumerate() {
        ensure!(node.count_h + node.count_v == node.len(), "label counts of node {id}");
        let children = tree.children_of(id as _);
        if children.is_empty() {
            continue;
        }
        let mut union = Vec::new();
        for c in children {
            let child = tree.node(c);
            ensure!(child.depth == node.depth + 1, "child depth of node {id}");
            for &i in &child.point_indices {
                let p = cloud.points()[i as usize];
                ensure!(
                    (0..3).all(|a| child.bounds_min[a] <= p[a] && p[a] <= child.bounds_max[a]),
                    "point {i} outside its node"
                );
            }
            union.extend_from_slice(&child.point_indices);
        }
        union.sort_unstable();
        let mut parent = node.point_indices.clone();
        parent.sort_unstable();
        ensure!(union == parent, "children of node {id} do not partition it");
    }
    Ok(())
}

pub fn segmentation_partition(r: &SegmentationResult, n: usize) -> Check {
    let mut seen = vec![0u32; n];
    for (id, plane) in r.planes.iter().enumerate() {
        for &i in plane.point_indices() {
            seen[i as usize] += 1;
            ensure!(r.assignment[i as usize] == Some(id as u32), "assignment of point {i}");
        }
    }
    for &i in &r.residual_indices {
        seen[i as usize] += 1;
        ensure!(r.assignment[i as usize].is_none(), "residual point {i} is assigned");
    }
    ensure!(seen.iter().all(|&c| c == 1), "points not covered exactly once");
    Ok(())
}

pub fn batch_stats(points: &[Point3]) -> (Point3, Matrix3<f64>) {
    let n = points.len() as f64;
    let mu = points.iter().fold(Vector3::zeros(), |acc, p| acc + p.coords) / n;
    let mut cov = Matrix3::zeros();
    for p in points {
        let d = p.coords - mu;
        cov += d * d.transpose();
    }
    (Point3::from(mu), cov)
}

/// Smallest-eigenvalue eigenvector by cyclic Jacobi rotations, independent
/// of the library's eigen solver.
pub fn oracle_normal(cov: &Matrix3<f64>) -> Vector3 {
    let mut a = *cov;
    let mut v = Matrix3::<f64>::identity();
    for _ in 0..50 {
        let off = a[(0, 1)].powi(2) + a[(0, 2)].powi(2) + a[(1, 2)].powi(2);
        if off <= 1e-300 {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if a[(p, q)] == 0.0 {
                continue;
            }
            let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            let mut rot = Matrix3::<f64>::identity();
            rot[(p, p)] = c;
            rot[(q, q)] = c;
            rot[(p, q)] = s;
            rot[(q, p)] = -s;
            a = rot.transpose() * a * rot;
            v *= rot;
        }
    }
    let k = (0..3).min_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)])).unwrap();
    v.column(k).normalize()
}

/// Merges fits of two disjoint random clusters and compares against batch
/// statistics of the union.
pub fn merge_matches_batch(n1: usize, n2: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Point3> = (0..n1 + n2)
        .map(|_| Point3::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
        .collect();
    let g = Vector3::z();
    let first: Vec<u32> = (0..n1 as u32).collect();
    let second: Vec<u32> = (n1 as u32..(n1 + n2) as u32).collect();
    let fit = |idx: &[u32]| fit_plane_pca(&points, idx, &g).map_err(|e| e.to_string());
    let merged = merge_planes(&fit(&first)?, &fit(&second)?, &g).map_err(|e| e.to_string())?;
    let (mu, cov) = batch_stats(&points);
    let dc = (merged.centroid() - mu).norm();
    ensure!(dc < 1e-12, "centroid off by {dc:e} (n1={n1} n2={n2} seed={seed})");
    let dv = (merged.covariance() - cov).abs().max();
    ensure!(dv < 1e-9, "covariance off by {dv:e} (n1={n1} n2={n2} seed={seed})");
    let oracle = oracle_normal(&cov);
    let dn = (1.0 - merged.normal().dot(&oracle).abs()).max(0.0);
    let angle = (2.0 * dn).sqrt();
    ensure!(angle < 1e-6, "normal off by {angle:e} (n1={n1} n2={n2} seed={seed})");
    Ok(())
}

pub fn merge_associativity(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Point3> = (0..90)
        .map(|_| Point3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-0.1..0.1)))
        .collect();
    let g = Vector3::z();
    let part = |r: std::ops::Range<u32>| fit_plane_pca(&points, &r.collect::<Vec<_>>(), &g).unwrap();
    let (a, b, c) = (part(0..30), part(30..60), part(60..90));
    let left = merge_planes(&merge_planes(&a, &b, &g).unwrap(), &c, &g).unwrap();
    let right = merge_planes(&a, &merge_planes(&b, &c, &g).unwrap(), &g).unwrap();
    ensure!((left.centroid() - right.centroid()).norm() < 1e-12, "centroids differ");
    ensure!((left.covariance() - right.covariance()).abs().max() < 1e-9, "covariances differ");
    ensure!(left.normal().dot(right.normal()).abs() > 1.0 - 1e-9, "normals differ");
    Ok(())
}

/// Compares the point-to-plane distance with the Hesse normal form of the
/// plane spanned by a point and two directions.
pub fn distance_oracle(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = || Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let (a, u, w) = (Point3::from(v()), v(), v());
    if u.cross(&w).norm() <= 0.1 {
        return Ok(());
    }
    let on_plane: Vec<Point3> = (0..20)
        .map(|i| a + u * ((i % 5) as f64 * 0.3) + w * ((i / 5) as f64 * 0.4))
        .collect();
    let idx: Vec<u32> = (0..20).collect();
    let plane = fit_plane_pca(&on_plane, &idx, &Vector3::z()).map_err(|e| e.to_string())?;
    // ax + by + cz + d = 0 through a with normal u x w
    let n = u.cross(&w);
    let d = -n.dot(&a.coords);
    for _ in 0..10 {
        let q = Point3::from(v() * 3.0);
        let oracle = (n.dot(&q.coords) + d).abs() / n.norm();
        let got = point_plane_distance(&q, &plane);
        ensure!((got - oracle).abs() < 1e-9, "distance {got} vs {oracle} (seed {seed})");
    }
    Ok(())
}

pub fn criterion_truth_tables() -> Check {
    let cfg = SegmenterConfig::default();
    let table = [
        (purity_ok(cfg.theta_n_out, cfg.theta_r_out, &cfg), true, "purity at both thresholds"),
        (purity_ok(cfg.theta_n_out + 1, cfg.theta_r_out, &cfg), false, "purity count above"),
        (purity_ok(cfg.theta_n_out, cfg.theta_r_out.next_up(), &cfg), false, "purity ratio above"),
        (purity_ok(0, 0.0, &cfg), true, "purity of a pure node"),
        (min_inliers_ok(cfg.theta_n_in, &cfg), true, "inliers at threshold"),
        (min_inliers_ok(cfg.theta_n_in - 1, &cfg), false, "inliers below"),
        (plane_candidate_ok(cfg.theta_e_n, &cfg), true, "flatness at threshold"),
        (plane_candidate_ok(cfg.theta_e_n.next_up(), &cfg), false, "flatness above"),
    ];
    for (got, want, what) in table {
        ensure!(got == want, "{what}: got {got}");
    }

    let g = Vector3::z();
    let grid = |center: Point3, tilt: f64| -> (Vec<Point3>, Vec<u32>) {
        let rot = Rotation3::from_axis_angle(&Vector3::y_axis(), tilt);
        let pts = (0..25)
            .map(|i| center + rot * Vector3::new((i % 5) as f64 * 0.1 - 0.2, (i / 5) as f64 * 0.1 - 0.2, 0.0))
            .collect();
        (pts, (0..25).collect())
    };
    let fit = |(p, i): (Vec<Point3>, Vec<u32>)| fit_plane_pca(&p, &i, &g).unwrap();
    let a = fit(grid(Point3::origin(), 0.0));
    // tilted about y and displaced along y, so the offset clause holds
    let b = fit(grid(Point3::new(0.0, 1.0, 0.0), 0.3));
    let dot = a.normal().dot(b.normal()).abs();
    let with = |theta: f64| SegmenterConfig {
        theta_coplane: theta,
        ..Default::default()
    };
    ensure!(coplanar_ok(&a, &b, &with(dot)), "coplanarity at the angle threshold");
    ensure!(!coplanar_ok(&a, &b, &with(dot.next_up())), "coplanarity above the angle threshold");

    // lifted copy: aligned normals, offset along the normal
    let c = fit(grid(Point3::new(1.0, 0.0, 0.2), 0.0));
    let offset = c.centroid() - a.centroid();
    let r = (a.normal().dot(&offset) / offset.norm()).abs();
    ensure!(coplanar_ok(&a, &c, &with(1.0 - (r + 1e-12))), "offset just inside the limit");
    ensure!(!coplanar_ok(&a, &c, &with(1.0 - (r - 1e-12))), "offset just outside the limit");
    ensure!(coplanar_ok(&a, &a.clone(), &cfg), "plane with itself");
    Ok(())
}

pub fn partition_sets(r: &SegmentationResult) -> BTreeSet<BTreeSet<u32>> {
    let mut sets: BTreeSet<BTreeSet<u32>> = r
        .planes
        .iter()
        .map(|p| p.point_indices().iter().copied().collect())
        .collect();
    sets.insert(r.residual_indices.iter().copied().collect());
    sets
}

/// The 24 rotations mapping the coordinate axes onto themselves.
pub fn cube_rotations() -> Vec<Matrix3<f64>> {
    let mut out = Vec::new();
    let axes = [Vector3::x(), Vector3::y(), Vector3::z()];
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            for si in [1.0, -1.0] {
                for sj in [1.0, -1.0] {
                    let a = axes[i] * si;
                    let b = axes[j] * sj;
                    out.push(Matrix3::from_columns(&[a, b, a.cross(&b)]));
                }
            }
        }
    }
    out
}

/// Segments a staircase, then every axis-preserving rotation of it with the
/// same labels, rotated gravity and a co-rotated octree cube. The point
/// partition must be identical and normals must rotate along.
pub fn rotation_equivariance(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scene = gen_staircase(
        rng.random_range(2..=4),
        rng.random_range(0.2..0.4),
        rng.random_range(0.4..1.0),
        rng.random_range(0.1..0.25),
        5e3,
        seed,
    )
    .map_err(|e| e.to_string())?;
    let cfg = SegmenterConfig::default();
    let origin = Point3::new(rng.random_range(-1.2..-0.8), rng.random_range(-1.2..-0.8), rng.random_range(-1.2..-0.8));
    let base = segment_with_origin(&scene.cloud, &cfg, origin).map_err(|e| e.to_string())?;
    let labels = scene.cloud.labels().unwrap().to_vec();
    for r in cube_rotations() {
        let rotated = scene.cloud.map_points(|p| Point3::from(r * p.coords)).unwrap();
        let rotated = inject_labels(&rotated, labels.clone()).unwrap();
        let min = (0..8)
            .map(|c| {
                let off = Vector3::new((c & 1) as f64, ((c >> 1) & 1) as f64, ((c >> 2) & 1) as f64) * cfg.octree_extent;
                r * (origin.coords + off)
            })
            .fold(Vector3::repeat(f64::INFINITY), |m, c| m.inf(&c));
        let rcfg = SegmenterConfig {
            gravity: r * cfg.gravity,
            ..cfg.clone()
        };
        let got = segment_with_origin(&rotated, &rcfg, Point3::from(min)).map_err(|e| e.to_string())?;
        ensure!(partition_sets(&got) == partition_sets(&base), "partition changed under rotation (seed {seed})");
        for plane in &base.planes {
            let first = plane.point_indices()[0] as usize;
            let other = &got.planes[got.assignment[first].unwrap() as usize];
            ensure!(
                other.normal().dot(&(r * plane.normal())).abs() > 1.0 - 1e-9,
                "normal did not rotate along (seed {seed})"
            );
        }
    }
    Ok(())
}

/// Distance from a point to the boundary of its staircase face.
fn stair_edge_distance(p: &Point3, id: u32, l: f64, w: f64, h: f64) -> f64 {
    let step = (id / 2) as f64;
    let (u, v, a, b) = if id % 2 == 0 {
        (p.y, p.z - step * h, w, h)
    } else {
        (p.x - step * l, p.y, l, w)
    };
    u.min(a - u).min(v).min(b - v)
}

/// Fraction of interior points (farther than two voxels from a face edge)
/// whose geometric label matches the ground truth.
pub fn label_agreement(seed: u64) -> f64 {
    let cfg = SegmenterConfig::default();
    let margin = 2.0 * cfg.voxel_size;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (steps, l, w, h) = (
        rng.random_range(2..=6),
        rng.random_range(0.2..0.4),
        rng.random_range(0.3..1.5),
        rng.random_range(0.1..0.3),
    );
    let scene = gen_staircase(steps, l, w, h, 1e4, seed).unwrap();
    let labeled = classify_cloud(&scene.cloud.clone().without_labels(), &cfg).unwrap();
    let got = labeled.labels().unwrap();
    let truth = scene.cloud.labels().unwrap();
    let (mut agree, mut total) = (0usize, 0usize);
    for (i, p) in scene.cloud.points().iter().enumerate() {
        if stair_edge_distance(p, scene.gt_plane_id[i], l, w, h) > margin {
            total += 1;
            agree += usize::from(got[i] == truth[i]);
        }
    }
    agree as f64 / total as f64
}
