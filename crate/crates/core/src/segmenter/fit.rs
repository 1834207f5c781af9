//! Plane fitting, incremental merging and point-to-plane distance.

use std::collections::HashSet;

use nalgebra::Matrix3;

use crate::linalg::SymEigen3;
use crate::types::symmetrize;
use crate::{Error, Plane, Point3, Result, Vector3};

/// Relative size of the middle eigenvalue below which a point set counts as
/// collinear.
const RANK_TOLERANCE: f64 = 1e-12;

/// Fits a plane to `points[indices]` by PCA of the centered scatter matrix.
/// The normal is the eigenvector of the smallest eigenvalue, oriented along
/// `gravity`.
pub fn fit_plane_pca(points: &[Point3], indices: &[u32], gravity: &Vector3) -> Result<Plane> {
    if indices.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            actual: indices.len(),
        });
    }
    let n = indices.len() as f64;
    let mut sum = Vector3::zeros();
    let mut second_moment = Matrix3::zeros();
    for &i in indices {
        let p = points[i as usize].coords;
        sum += p;
        second_moment += p * p.transpose();
    }
    let mu = sum / n;
    let mut scatter = Matrix3::zeros();
    for &i in indices {
        let d = points[i as usize].coords - mu;
        scatter += d * d.transpose();
    }
    let scatter = symmetrize(scatter);
    check_rank(&scatter)?;
    Ok(Plane::from_statistics(
        indices.to_vec(),
        Point3::from(mu),
        second_moment,
        scatter,
        gravity,
    ))
}

fn check_rank(scatter: &Matrix3<f64>) -> Result<()> {
    let eig = SymEigen3::new(scatter);
    if eig.values[2] <= 0.0 {
        return Err(Error::Degenerate("all points coincide"));
    }
    if eig.values[1] <= RANK_TOLERANCE * eig.values[2] {
        return Err(Error::Degenerate("points are collinear"));
    }
    Ok(())
}

/// Merges two planes with disjoint members using only their statistics:
/// second moments add, the centroid is the count-weighted mean and the
/// scatter matrix is rebuilt as `Σ p pᵀ − N μ μᵀ`.
pub fn merge_planes(p1: &Plane, p2: &Plane, gravity: &Vector3) -> Result<Plane> {
    let (small, large) = if p1.count() <= p2.count() { (p1, p2) } else { (p2, p1) };
    let seen: HashSet<u32> = small.point_indices.iter().copied().collect();
    if large.point_indices.iter().any(|i| seen.contains(i)) {
        return Err(Error::OverlappingPlanes);
    }
    let mut merged = p1.clone();
    merged.absorb(p2, gravity);
    Ok(merged)
}

impl Plane {
    /// In-place merge; the caller guarantees disjoint members.
    pub(crate) fn absorb(&mut self, other: &Plane, gravity: &Vector3) {
        let n1 = self.count() as f64;
        let n2 = other.count() as f64;
        let total = n1 + n2;
        let second_moment = self.second_moment + other.second_moment;
        let mu = self.centroid.coords * (n1 / total) + other.centroid.coords * (n2 / total);
        let scatter = symmetrize(second_moment - (mu * mu.transpose()) * total);
        let mut indices = std::mem::take(&mut self.point_indices);
        indices.extend_from_slice(&other.point_indices);
        *self = Plane::from_statistics(indices, Point3::from(mu), second_moment, scatter, gravity);
    }

    /// Adds individual points to the plane's statistics.
    pub(crate) fn absorb_points(&mut self, points: &[Point3], extra: &[u32], gravity: &Vector3) {
        let mut sum = self.centroid.coords * self.count() as f64;
        let mut second_moment = self.second_moment;
        for &i in extra {
            let p = points[i as usize].coords;
            sum += p;
            second_moment += p * p.transpose();
        }
        let mut indices = std::mem::take(&mut self.point_indices);
        indices.extend_from_slice(extra);
        let mu = sum / indices.len() as f64;
        let scatter = symmetrize(second_moment - (mu * mu.transpose()) * indices.len() as f64);
        *self = Plane::from_statistics(indices, Point3::from(mu), second_moment, scatter, gravity);
    }
}

/// Absolute distance from `p` to the plane through the centroid with the
/// plane's normal.
pub fn point_plane_distance(p: &Point3, plane: &Plane) -> f64 {
    plane.normal.dot(&(p - plane.centroid)).abs()
}
