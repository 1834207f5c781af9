//! Pointwise inclination labels from PCA normals.
//!
//! Each point's normal is estimated from its `k` nearest neighbors and compared
//! with the gravity baseline: points whose normal lies within 45 degrees of
//! gravity are labeled [`Category::H`], all others [`Category::V`]. Labels
//! produced elsewhere (for example by a learned classifier) can be attached
//! with [`inject_labels`].

use std::f64::consts::FRAC_PI_4;

use nalgebra::Matrix3;
use rayon::prelude::*;

use crate::knn::GridIndex;
use crate::linalg::{orient_normal, smallest_eigenpair, SymEigen3};
use crate::{Category, Error, LabeledCloud, Result, SegmenterConfig, Vector3};

const UNIT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalEstimate {
    pub normal: Vector3,
    /// Surface variation `λ_min / (λ0 + λ1 + λ2)`, in `[0, 1/3]`.
    pub curvature: f64,
    pub neighbor_count: usize,
}

/// Estimates a unit normal for every point from its `k` nearest neighbors
/// (the point itself included). Normals are oriented along `gravity`.
pub fn estimate_normals(cloud: &LabeledCloud, k: usize, gravity: &Vector3) -> Result<Vec<NormalEstimate>> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!("k must be at least 3, got {k}")));
    }
    if cloud.len() < k {
        return Err(Error::TooFewPoints {
            needed: k,
            actual: cloud.len(),
        });
    }
    let points = cloud.points();
    let neighbors = GridIndex::new(points, k).knn_all(k);
    let estimates = neighbors
        .par_chunks_exact(k)
        .map(|neighbors| {
            let n = k as f64;
            let mean = neighbors
                .iter()
                .fold(Vector3::zeros(), |acc, &i| acc + points[i as usize].coords)
                / n;
            let mut scatter = Matrix3::zeros();
            for &i in neighbors {
                let d = points[i as usize].coords - mean;
                scatter += d * d.transpose();
            }
            let (values, normal) = smallest_eigenpair(&scatter).unwrap_or_else(|| {
                let eig = SymEigen3::new(&scatter);
                (eig.values, eig.vectors[0])
            });
            let trace: f64 = values.iter().sum();
            let curvature = if trace > 0.0 {
                (values[0].max(0.0) / trace).min(1.0 / 3.0)
            } else {
                0.0
            };
            NormalEstimate {
                normal: orient_normal(normal, gravity),
                curvature,
                neighbor_count: k,
            }
        })
        .collect();
    Ok(estimates)
}

/// Angle between a normal and the baseline, folded into `[0, π/2]`.
pub fn angle_to_baseline(normal: &Vector3, baseline: &Vector3) -> Result<f64> {
    let (nn, nb) = (normal.norm(), baseline.norm());
    if nn == 0.0 || nb == 0.0 || !nn.is_finite() || !nb.is_finite() {
        return Err(Error::InvalidArgument("zero-length vector".into()));
    }
    let cos = (normal.dot(baseline).abs() / (nn * nb)).clamp(0.0, 1.0);
    Ok(cos.acos())
}

/// Category of a normal under the 45-degree rule; the boundary maps to `H`.
pub fn categorize(normal: &Vector3, gravity: &Vector3) -> Result<Category> {
    Ok(if angle_to_baseline(normal, gravity)? <= FRAC_PI_4 {
        Category::H
    } else {
        Category::V
    })
}

/// Labels every point of `cloud` from its estimated normal.
pub fn classify_cloud(cloud: &LabeledCloud, cfg: &SegmenterConfig) -> Result<LabeledCloud> {
    if (cfg.gravity.norm() - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::InvalidArgument("gravity must be a unit vector".into()));
    }
    let normals = estimate_normals(cloud, cfg.classify_k, &cfg.gravity)?;
    let labels = normals
        .iter()
        .map(|e| categorize(&e.normal, &cfg.gravity))
        .collect::<Result<Vec<_>>>()?;
    cloud.clone().replace_labels(labels)
}

pub fn inject_labels(cloud: &LabeledCloud, labels: Vec<Category>) -> Result<LabeledCloud> {
    cloud.clone().replace_labels(labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Point3;
    use rand::{Rng, SeedableRng};
    use rand_distr::{Distribution, Normal};
    use std::f64::consts::FRAC_PI_2;

    fn grid_plane(f: impl Fn(f64, f64) -> Point3) -> LabeledCloud {
        let mut pts = Vec::new();
        for i in 0..10 {
            for j in 0..10 {
                pts.push(f(i as f64 * 0.02, j as f64 * 0.02));
            }
        }
        LabeledCloud::new(pts).unwrap()
    }

    #[test]
    fn horizontal_plane_normals_point_up() {
        let cloud = grid_plane(|a, b| Point3::new(a, b, 0.0));
        let est = estimate_normals(&cloud, 16, &Vector3::z()).unwrap();
        for e in &est {
            assert!((e.normal - Vector3::z()).norm() < 1e-6);
            assert!(e.curvature < 1e-12);
            assert_eq!(e.neighbor_count, 16);
        }
    }

    #[test]
    fn vertical_plane_uses_tie_rule() {
        let cloud = grid_plane(|a, b| Point3::new(0.0, a, b));
        let est = estimate_normals(&cloud, 16, &Vector3::z()).unwrap();
        for e in &est {
            assert!((e.normal - Vector3::x()).norm() < 1e-6, "{:?}", e.normal);
        }
    }

    #[test]
    fn too_small_cloud_is_rejected() {
        let cloud = grid_plane(|a, b| Point3::new(a, b, 0.0));
        assert!(matches!(
            estimate_normals(&cloud, 101, &Vector3::z()),
            Err(Error::TooFewPoints { needed: 101, actual: 100 })
        ));
    }

    #[test]
    fn baseline_angles() {
        let g = Vector3::z();
        assert_eq!(angle_to_baseline(&Vector3::z(), &g).unwrap(), 0.0);
        assert!((angle_to_baseline(&Vector3::x(), &g).unwrap() - FRAC_PI_2).abs() < 1e-15);
        let diag = Vector3::new(0.0, 0.5f64.sqrt(), 0.5f64.sqrt());
        assert!((angle_to_baseline(&diag, &g).unwrap() - FRAC_PI_4).abs() < 1e-12);
        assert!(angle_to_baseline(&Vector3::zeros(), &g).is_err());
    }

    #[test]
    fn angle_ignores_sign() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)).normalize();
            let b = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)).normalize();
            let a = angle_to_baseline(&n, &b).unwrap();
            assert_eq!(a, angle_to_baseline(&-n, &b).unwrap());
            assert_eq!(a, angle_to_baseline(&n, &-b).unwrap());
        }
    }

    #[test]
    fn planes_classify_uniformly() {
        let cfg = SegmenterConfig::default();
        let floor = classify_cloud(&grid_plane(|a, b| Point3::new(a, b, 0.0)), &cfg).unwrap();
        assert!(floor.labels().unwrap().iter().all(|&c| c == Category::H));
        let wall = classify_cloud(&grid_plane(|a, b| Point3::new(a, 1.0, b)), &cfg).unwrap();
        assert!(wall.labels().unwrap().iter().all(|&c| c == Category::V));
    }

    // Monte-Carlo: noisy plane normals stay within a few degrees of the truth.
    #[test]
    fn noisy_plane_normal_error_is_small() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let noise = Normal::new(0.0, 0.003).unwrap();
        let mut total = 0.0;
        let mut count = 0usize;
        for _ in 0..100 {
            // 0.02 m spacing, matching the voxelized density
            let pts: Vec<Point3> = (0..400)
                .map(|_| {
                    Point3::new(
                        rng.random_range(0.0..0.4),
                        rng.random_range(0.0..0.4),
                        noise.sample(&mut rng),
                    )
                })
                .collect();
            let cloud = LabeledCloud::new(pts).unwrap();
            for e in estimate_normals(&cloud, 16, &Vector3::z()).unwrap() {
                total += e.normal.z.clamp(-1.0, 1.0).acos().to_degrees();
                count += 1;
            }
        }
        let mean = total / count as f64;
        assert!(mean <= 5.0, "mean normal error {mean} deg");
    }

    #[test]
    fn inject_checks_length() {
        let cloud = grid_plane(|a, b| Point3::new(a, b, 0.0));
        let labeled = inject_labels(&cloud, vec![Category::V; 100]).unwrap();
        assert!(labeled.labels().unwrap().iter().all(|&c| c == Category::V));
        assert!(matches!(
            inject_labels(&cloud, vec![Category::V; 3]),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
