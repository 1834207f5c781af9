//! Synthetic scenes with ground-truth plane membership.
//!
//! Every generator samples its faces uniformly at a given surface density and
//! labels each point with the category of the face it lies on. Faces are
//! sampled exactly on their planes, so noise has to be added separately.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::{Category, Error, LabeledCloud, Point3, Result, Vector3};

/// Surface density used when none is given, in points per square meter.
pub const DEFAULT_DENSITY: f64 = 1e4;

/// Evaluation scenes are sampled densely enough to hold at least this many
/// points, so that an 8192-point subsample is well spread.
pub const SUITE_MIN_POINTS: usize = 16_384;

/// Parameters a scene was generated from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShapeSpec {
    Staircase {
        steps: usize,
        length: f64,
        width: f64,
        height: f64,
    },
    Box {
        length: f64,
        width: f64,
        height: f64,
    },
    Plane {
        length: f64,
        width: f64,
        normal: Vector3,
    },
    /// Read from a file; the generating parameters are unknown.
    External,
}

#[derive(Debug, Clone)]
pub struct GroundTruthScene {
    pub cloud: LabeledCloud,
    /// Ground-truth plane of every point.
    pub gt_plane_id: Vec<u32>,
    /// Unit normal of every ground-truth plane.
    pub gt_normals: Vec<Vector3>,
    pub spec: ShapeSpec,
}

impl GroundTruthScene {
    pub fn plane_count(&self) -> usize {
        self.gt_normals.len()
    }

    /// Keeps the points at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            cloud: self.cloud.select(indices),
            gt_plane_id: indices.iter().map(|&i| self.gt_plane_id[i]).collect(),
            gt_normals: self.gt_normals.clone(),
            spec: self.spec,
        }
    }

    /// Points of each ground-truth plane.
    pub fn plane_members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.gt_normals.len()];
        for (i, &id) in self.gt_plane_id.iter().enumerate() {
            members[id as usize].push(i);
        }
        members
    }
}

/// Ground-truth category of a face with unit normal `n` under +z gravity.
pub fn face_category(n: &Vector3) -> Category {
    if n.z.abs() >= FRAC_1_SQRT_2 {
        Category::H
    } else {
        Category::V
    }
}

/// A planar rectangle `origin + s·u + t·v`, `s ∈ [0, a]`, `t ∈ [0, b]`, with
/// `u`, `v` unit and orthogonal.
struct Face {
    origin: Point3,
    u: Vector3,
    v: Vector3,
    a: f64,
    b: f64,
    normal: Vector3,
}

#[derive(Default)]
struct Builder {
    points: Vec<Point3>,
    labels: Vec<Category>,
    ids: Vec<u32>,
    normals: Vec<Vector3>,
}

impl Builder {
    fn face(&mut self, face: Face, density: f64, rng: &mut ChaCha8Rng) {
        let id = self.normals.len() as u32;
        let count = (face.a * face.b * density).round().max(1.0) as usize;
        let category = face_category(&face.normal);
        for _ in 0..count {
            let s = rng.random::<f64>() * face.a;
            let t = rng.random::<f64>() * face.b;
            self.points.push(face.origin + face.u * s + face.v * t);
            self.labels.push(category);
            self.ids.push(id);
        }
        self.normals.push(face.normal);
    }

    fn finish(self, spec: ShapeSpec) -> GroundTruthScene {
        GroundTruthScene {
            cloud: LabeledCloud::with_labels(self.points, self.labels).expect("finite by construction"),
            gt_plane_id: self.ids,
            gt_normals: self.normals,
            spec,
        }
    }
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive, got {value}")))
    }
}

/// Closed staircase rising along +x. Riser `i` is the plane `x = i·length`
/// spanning `z ∈ [i·height, (i+1)·height]` and facing -x; tread `i` is the
/// plane `z = (i+1)·height` spanning `x ∈ [i·length, (i+1)·length]`. Both span
/// `y ∈ [0, width]`. Plane ids alternate riser, tread starting from the bottom.
pub fn gen_staircase(
    steps: usize,
    length: f64,
    width: f64,
    height: f64,
    density: f64,
    seed: u64,
) -> Result<GroundTruthScene> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    for (name, v) in [("length", length), ("width", width), ("height", height), ("density", density)] {
        check_positive(name, v)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = Builder::default();
    let (x, y, z) = (Vector3::x(), Vector3::y(), Vector3::z());
    for i in 0..steps {
        let (fx, fz) = (i as f64 * length, i as f64 * height);
        b.face(
            Face {
                origin: Point3::new(fx, 0.0, fz),
                u: y,
                v: z,
                a: width,
                b: height,
                normal: -x,
            },
            density,
            &mut rng,
        );
        b.face(
            Face {
                origin: Point3::new(fx, 0.0, fz + height),
                u: x,
                v: y,
                a: length,
                b: width,
                normal: z,
            },
            density,
            &mut rng,
        );
    }
    Ok(b.finish(ShapeSpec::Staircase {
        steps,
        length,
        width,
        height,
    }))
}

/// Box resting on the ground, centered on the z axis: top face first, then
/// the -x, +x, -y and +y sides with outward normals. No bottom face.
pub fn gen_box(length: f64, width: f64, height: f64, density: f64, seed: u64) -> Result<GroundTruthScene> {
    for (name, v) in [("length", length), ("width", width), ("height", height), ("density", density)] {
        check_positive(name, v)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = Builder::default();
    let (hx, hy) = (length / 2.0, width / 2.0);
    let (x, y, z) = (Vector3::x(), Vector3::y(), Vector3::z());
    let faces = [
        Face {
            origin: Point3::new(-hx, -hy, height),
            u: x,
            v: y,
            a: length,
            b: width,
            normal: z,
        },
        Face {
            origin: Point3::new(-hx, -hy, 0.0),
            u: y,
            v: z,
            a: width,
            b: height,
            normal: -x,
        },
        Face {
            origin: Point3::new(hx, -hy, 0.0),
            u: y,
            v: z,
            a: width,
            b: height,
            normal: x,
        },
        Face {
            origin: Point3::new(-hx, -hy, 0.0),
            u: x,
            v: z,
            a: length,
            b: height,
            normal: -y,
        },
        Face {
            origin: Point3::new(-hx, hy, 0.0),
            u: x,
            v: z,
            a: length,
            b: height,
            normal: y,
        },
    ];
    for face in faces {
        b.face(face, density, &mut rng);
    }
    Ok(b.finish(ShapeSpec::Box { length, width, height }))
}

/// A single `length × width` rectangle centered at the origin whose normal
/// has z-component `nz`; the azimuth of the normal is drawn from the seed.
pub fn gen_plane(length: f64, width: f64, nz: f64, density: f64, seed: u64) -> Result<GroundTruthScene> {
    for (name, v) in [("length", length), ("width", width), ("density", density)] {
        check_positive(name, v)?;
    }
    if !(-1.0..=1.0).contains(&nz) {
        return Err(Error::InvalidArgument(format!("nz must lie in [-1, 1], got {nz}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let azimuth = rng.random::<f64>() * TAU;
    let r = (1.0 - nz * nz).max(0.0).sqrt();
    let normal = Vector3::new(r * azimuth.cos(), r * azimuth.sin(), nz);
    // any unit vector orthogonal to the normal, then complete the frame
    let helper = if nz.abs() < 0.9 { Vector3::z() } else { Vector3::x() };
    let u = normal.cross(&helper).normalize();
    let v = normal.cross(&u);
    let mut b = Builder::default();
    b.face(
        Face {
            origin: Point3::origin() - u * (length / 2.0) - v * (width / 2.0),
            u,
            v,
            a: length,
            b: width,
            normal,
        },
        density,
        &mut rng,
    );
    Ok(b.finish(ShapeSpec::Plane { length, width, normal }))
}

/// Adds isotropic Gaussian noise with standard deviation `sigma` (meters) to
/// every coordinate.
pub fn add_noise(scene: &GroundTruthScene, sigma: f64, seed: u64) -> Result<GroundTruthScene> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::InvalidArgument(format!("sigma must be nonnegative, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(scene.clone());
    }
    let normal = Normal::new(0.0, sigma).expect("valid sigma");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = scene
        .cloud
        .points()
        .iter()
        .map(|p| p + Vector3::from_fn(|_, _| normal.sample(&mut rng)))
        .collect();
    let cloud = match scene.cloud.labels() {
        Some(l) => LabeledCloud::with_labels(points, l.to_vec())?,
        None => LabeledCloud::new(points)?,
    };
    Ok(GroundTruthScene { cloud, ..scene.clone() })
}

/// Training-style augmentations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AugmentOp {
    /// Adds uniform noise in `[-amplitude, amplitude]` to every coordinate.
    JitterUniform { amplitude: f64 },
    /// Rotates about +z by `angle` radians, or by a random angle when `None`.
    RotateZ { angle: Option<f64> },
    /// Removes every point within `radius` of `k` randomly chosen points.
    DropClusters { k: usize, radius: f64 },
}

impl AugmentOp {
    pub const DEFAULT_JITTER: f64 = 0.01;
    pub const DEFAULT_CLUSTER_RADIUS: f64 = 0.05;
}

/// Applies `ops` in order.
pub fn augment(scene: &GroundTruthScene, ops: &[AugmentOp], seed: u64) -> Result<GroundTruthScene> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = scene.clone();
    for op in ops {
        out = match *op {
            AugmentOp::JitterUniform { amplitude } => {
                check_positive("jitter amplitude", amplitude)?;
                let (points, labels) = out.cloud.clone().into_parts();
                let points = points
                    .into_iter()
                    .map(|p| p + Vector3::from_fn(|_, _| rng.random_range(-amplitude..=amplitude)))
                    .collect();
                let cloud = match labels {
                    Some(l) => LabeledCloud::with_labels(points, l)?,
                    None => LabeledCloud::new(points)?,
                };
                GroundTruthScene { cloud, ..out }
            }
            AugmentOp::RotateZ { angle } => {
                let angle = angle.unwrap_or_else(|| rng.random::<f64>() * TAU);
                let rot = nalgebra::Rotation3::from_axis_angle(&Vector3::z_axis(), angle);
                let cloud = out.cloud.map_points(|p| rot * p)?;
                let gt_normals = out.gt_normals.iter().map(|n| rot * n).collect();
                GroundTruthScene {
                    cloud,
                    gt_normals,
                    ..out
                }
            }
            AugmentOp::DropClusters { k, radius } => {
                check_positive("cluster radius", radius)?;
                if k == 0 || out.cloud.is_empty() {
                    continue;
                }
                let pts = out.cloud.points();
                let centers: Vec<Point3> = (0..k).map(|_| pts[rng.random_range(0..pts.len())]).collect();
                let r2 = radius * radius;
                let keep: Vec<usize> = (0..pts.len())
                    .filter(|&i| centers.iter().all(|c| (pts[i] - c).norm_squared() > r2))
                    .collect();
                out.select(&keep)
            }
        };
    }
    Ok(out)
}

/// Staircase parameters drawn for one evaluation scene.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StairParams {
    pub steps: usize,
    pub length: f64,
    pub width: f64,
    pub height: f64,
    pub density: f64,
    pub seed: u64,
}

impl StairParams {
    pub fn area(&self) -> f64 {
        self.steps as f64 * self.width * (self.length + self.height)
    }

    pub fn generate(&self) -> Result<GroundTruthScene> {
        gen_staircase(self.steps, self.length, self.width, self.height, self.density, self.seed)
    }
}

/// Draws the parameters of `n` evaluation staircases: 2 to 6 steps, step
/// length in [0.2, 0.4] m, width in [0.3, 1.5] m and height in [0.1, 0.3] m.
pub fn eval_suite_params(n: usize, seed: u64) -> Vec<StairParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let mut p = StairParams {
                steps: rng.random_range(2..=6),
                length: rng.random_range(0.2..=0.4),
                width: rng.random_range(0.3..=1.5),
                height: rng.random_range(0.1..=0.3),
                density: DEFAULT_DENSITY,
                seed: rng.random(),
            };
            p.density = DEFAULT_DENSITY.max(SUITE_MIN_POINTS as f64 / p.area());
            p
        })
        .collect()
}

pub fn gen_eval_suite(n: usize, seed: u64) -> Result<Vec<GroundTruthScene>> {
    if n == 0 {
        return Err(Error::InvalidArgument("suite needs at least one scene".into()));
    }
    eval_suite_params(n, seed).iter().map(StairParams::generate).collect()
}

/// Serializes the ground truth as text: a `planes P` line followed by `id nx
/// ny nz` rows, then a `points N` line followed by one plane id per point.
pub fn ground_truth_to_text(scene: &GroundTruthScene) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "planes {}", scene.gt_normals.len());
    for (i, n) in scene.gt_normals.iter().enumerate() {
        let _ = writeln!(s, "{i} {:?} {:?} {:?}", n.x, n.y, n.z);
    }
    let _ = writeln!(s, "points {}", scene.gt_plane_id.len());
    for id in &scene.gt_plane_id {
        let _ = writeln!(s, "{id}");
    }
    s
}

pub fn write_ground_truth(scene: &GroundTruthScene, path: &Path) -> Result<()> {
    std::fs::write(path, ground_truth_to_text(scene)).map_err(|e| Error::io(path, e))
}

/// Ground-truth plane ids and normals parsed from [`ground_truth_to_text`]
/// output.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub plane_ids: Vec<u32>,
    pub normals: Vec<Vector3>,
}

impl GroundTruth {
    /// Attaches the ground truth to a cloud read separately.
    pub fn into_scene(self, cloud: LabeledCloud) -> Result<GroundTruthScene> {
        if cloud.len() != self.plane_ids.len() {
            return Err(Error::LengthMismatch {
                expected: self.plane_ids.len(),
                actual: cloud.len(),
            });
        }
        Ok(GroundTruthScene {
            cloud,
            gt_plane_id: self.plane_ids,
            gt_normals: self.normals,
            spec: ShapeSpec::External,
        })
    }
}

pub fn parse_ground_truth(text: &str) -> Result<GroundTruth> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let mut next = |expect: &str| {
        lines
            .next()
            .ok_or_else(|| Error::parse("ground truth", "end of file", format!("expected {expect}")))
    };
    let count = |(lineno, line): (usize, &str), key: &str| -> Result<usize> {
        line.strip_prefix(key)
            .and_then(|rest| rest.trim().parse().ok())
            .ok_or_else(|| Error::parse("ground truth", format!("line {lineno}"), format!("expected `{key} <count>`")))
    };
    let n_planes = count(next("plane count")?, "planes")?;
    let mut normals = Vec::with_capacity(n_planes);
    for i in 0..n_planes {
        let (lineno, line) = next("plane normal")?;
        let bad = || Error::parse("ground truth", format!("line {lineno}"), "expected `id nx ny nz`");
        let v: Vec<f64> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        if v.len() != 4 || v[0] != i as f64 {
            return Err(bad());
        }
        normals.push(Vector3::new(v[1], v[2], v[3]));
    }
    let n_points = count(next("point count")?, "points")?;
    let mut plane_ids = Vec::with_capacity(n_points);
    for _ in 0..n_points {
        let (lineno, line) = next("plane id")?;
        let id: u32 = line
            .parse()
            .map_err(|_| Error::parse("ground truth", format!("line {lineno}"), format!("bad plane id `{line}`")))?;
        if id as usize >= n_planes {
            return Err(Error::parse(
                "ground truth",
                format!("line {lineno}"),
                format!("plane id {id} out of range"),
            ));
        }
        plane_ids.push(id);
    }
    Ok(GroundTruth { plane_ids, normals })
}

pub fn read_ground_truth(path: &Path) -> Result<GroundTruth> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_ground_truth(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_plane_residual(scene: &GroundTruthScene) -> f64 {
        let pts = scene.cloud.points();
        scene
            .plane_members()
            .iter()
            .zip(&scene.gt_normals)
            .map(|(members, n)| {
                let d0 = n.dot(&pts[members[0]].coords);
                members
                    .iter()
                    .map(|&i| (n.dot(&pts[i].coords) - d0).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn single_step() {
        let s = gen_staircase(1, 0.3, 1.0, 0.2, 1e3, 0).unwrap();
        assert_eq!(s.plane_count(), 2);
        assert_eq!(s.gt_normals, vec![-Vector3::x(), Vector3::z()]);
    }

    #[test]
    fn top_tread_height() {
        let s = gen_staircase(3, 0.3, 1.0, 0.2, 1e3, 4).unwrap();
        let top = s.plane_members().pop().unwrap();
        let mean_z = top.iter().map(|&i| s.cloud.points()[i].z).sum::<f64>() / top.len() as f64;
        assert!((mean_z - 0.6).abs() < 1e-12);
    }

    #[test]
    fn scenes_are_coplanar_per_plane() {
        for seed in 0..5 {
            assert!(max_plane_residual(&gen_staircase(4, 0.25, 0.7, 0.15, 2e3, seed).unwrap()) < 1e-9);
            assert!(max_plane_residual(&gen_box(0.5, 0.8, 0.2, 2e3, seed).unwrap()) < 1e-9);
            assert!(max_plane_residual(&gen_plane(1.0, 0.5, 0.3, 2e3, seed).unwrap()) < 1e-9);
        }
    }

    #[test]
    fn box_faces() {
        let b = gen_box(1.0, 1.0, 1.0, 1e3, 1).unwrap();
        assert_eq!(b.plane_count(), 5);
        assert_eq!(b.gt_normals[0], Vector3::z());

        let density = 2e4;
        let b = gen_box(0.6, 0.4, 0.1, density, 2).unwrap();
        let side = b.gt_plane_id.iter().filter(|&&id| id > 0).count() as f64;
        let expected = density * 2.0 * (0.6 + 0.4) * 0.1;
        assert!((side - expected).abs() <= 0.1 * expected);
    }

    #[test]
    fn plane_labels() {
        let h = gen_plane(1.0, 1.0, 1.0, 100.0, 0).unwrap();
        assert!(h.cloud.labels().unwrap().iter().all(|&c| c == Category::H));
        let v = gen_plane(1.0, 1.0, 0.0, 100.0, 0).unwrap();
        assert!(v.cloud.labels().unwrap().iter().all(|&c| c == Category::V));
        let edge = gen_plane(1.0, 1.0, FRAC_1_SQRT_2, 100.0, 0).unwrap();
        assert_eq!(edge.cloud.labels().unwrap()[0], Category::H);
        assert!((edge.gt_normals[0].norm() - 1.0).abs() < 1e-12);
        assert!(gen_plane(1.0, 1.0, 1.5, 100.0, 0).is_err());
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(gen_staircase(0, 0.3, 1.0, 0.2, 1e3, 0).is_err());
        assert!(gen_staircase(2, -0.3, 1.0, 0.2, 1e3, 0).is_err());
        assert!(gen_box(1.0, 0.0, 1.0, 1e3, 0).is_err());
    }

    #[test]
    fn noise_statistics() {
        let s = gen_plane(1.0, 1.0, 1.0, 1e4, 3).unwrap();
        assert_eq!(add_noise(&s, 0.0, 1).unwrap().cloud.points(), s.cloud.points());
        let sigma = 0.003;
        let noisy = add_noise(&s, sigma, 1).unwrap();
        let ms = noisy
            .cloud
            .points()
            .iter()
            .zip(s.cloud.points())
            .map(|(a, b)| (a - b).norm_squared())
            .sum::<f64>()
            / s.cloud.len() as f64;
        let expected = sigma * 3f64.sqrt();
        assert!((ms.sqrt() - expected).abs() < 0.05 * expected);
        assert_eq!(add_noise(&s, sigma, 1).unwrap().cloud.points(), noisy.cloud.points());
        assert_eq!(noisy.gt_plane_id, s.gt_plane_id);
    }

    #[test]
    fn augmentations() {
        let s = gen_staircase(2, 0.3, 0.5, 0.2, 2e3, 7).unwrap();
        let rotated = augment(&s, &[AugmentOp::RotateZ { angle: Some(std::f64::consts::FRAC_PI_2) }], 0).unwrap();
        let n = rotated.gt_normals[0];
        assert!((n - Vector3::new(0.0, -1.0, 0.0)).norm() < 1e-12);
        let r = nalgebra::Rotation3::from_axis_angle(&Vector3::z_axis(), std::f64::consts::FRAC_PI_2);
        assert!((r * Vector3::x() - Vector3::y()).norm() < 1e-12);

        let same = augment(&s, &[AugmentOp::DropClusters { k: 0, radius: 0.05 }], 0).unwrap();
        assert_eq!(same.cloud.points(), s.cloud.points());

        let dropped = augment(&s, &[AugmentOp::DropClusters { k: 3, radius: 0.05 }], 0).unwrap();
        assert!(dropped.cloud.len() < s.cloud.len());
        assert_eq!(dropped.cloud.len(), dropped.gt_plane_id.len());

        let amp = AugmentOp::DEFAULT_JITTER;
        let jittered = augment(&s, &[AugmentOp::JitterUniform { amplitude: amp }], 5).unwrap();
        let max = jittered
            .cloud
            .points()
            .iter()
            .zip(s.cloud.points())
            .flat_map(|(a, b)| (a - b).iter().map(|d| d.abs()).collect::<Vec<_>>())
            .fold(0.0, f64::max);
        assert!(max <= amp && max > 0.9 * amp);
    }

    #[test]
    fn suite_ranges_and_determinism() {
        let params = eval_suite_params(100, 11);
        for p in &params {
            assert!((2..=6).contains(&p.steps));
            assert!((0.2..=0.4).contains(&p.length));
            assert!((0.3..=1.5).contains(&p.width));
            assert!((0.1..=0.3).contains(&p.height));
            assert!(p.density * p.area() >= SUITE_MIN_POINTS as f64 - 1e-6);
        }
        assert_eq!(params, eval_suite_params(100, 11));
        let a = gen_eval_suite(2, 3).unwrap();
        let b = gen_eval_suite(2, 3).unwrap();
        assert_eq!(a[1].cloud.points(), b[1].cloud.points());
        assert!(gen_eval_suite(0, 3).is_err());
    }

    #[test]
    fn ground_truth_text_round_trip() {
        let s = gen_box(0.3, 0.2, 0.1, 500.0, 9).unwrap();
        let gt = parse_ground_truth(&ground_truth_to_text(&s)).unwrap();
        assert_eq!(gt.plane_ids, s.gt_plane_id);
        assert_eq!(gt.normals, s.gt_normals);
        assert!(parse_ground_truth("planes 1\n0 0 0 1\npoints 1\n3\n").is_err());
        assert!(parse_ground_truth("planes 1\n0 0 0 1\npoints 2\n0\n").is_err());
    }
}
