//! Small dense helpers around 3×3 symmetric eigenproblems.

use nalgebra::{Matrix3, SymmetricEigen};

use crate::Vector3;

/// Below this magnitude a dot product is treated as an exact tie when
/// orienting normals.
const ORIENT_TIE_EPS: f64 = 1e-12;

/// Eigen-decomposition of a symmetric 3×3 matrix with eigenpairs sorted by
/// ascending eigenvalue.
#[derive(Debug, Clone, Copy)]
pub struct SymEigen3 {
    pub values: [f64; 3],
    pub vectors: [Vector3; 3],
}

impl SymEigen3 {
    pub fn new(m: &Matrix3<f64>) -> Self {
        let eig = SymmetricEigen::new(*m);
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.map(|i| eig.eigenvalues[i]);
        let vectors = order.map(|i| eig.eigenvectors.column(i).normalize());
        Self { values, vectors }
    }
}

/// Closed-form eigenvalues (ascending) and the eigenvector of the smallest
/// one. Returns `None` when the smallest eigenvalue is too close to the
/// middle one for the cross-product construction to be accurate.
pub fn smallest_eigenpair(m: &Matrix3<f64>) -> Option<([f64; 3], Vector3)> {
    let q = m.trace() / 3.0;
    let p1 = m[(0, 1)].powi(2) + m[(0, 2)].powi(2) + m[(1, 2)].powi(2);
    let p2 = (m[(0, 0)] - q).powi(2) + (m[(1, 1)] - q).powi(2) + (m[(2, 2)] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    if !(p > 0.0) {
        return None;
    }
    let b = (m - Matrix3::identity() * q) / p;
    let r = (b.determinant() / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let hi = q + 2.0 * p * phi.cos();
    let lo = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
    let mid = 3.0 * q - hi - lo;
    if mid - lo < 1e-6 * p {
        return None;
    }
    let a = m - Matrix3::identity() * lo;
    let rows = [a.row(0).transpose(), a.row(1).transpose(), a.row(2).transpose()];
    let best = [(0, 1), (0, 2), (1, 2)]
        .map(|(i, j)| rows[i].cross(&rows[j]))
        .into_iter()
        .max_by(|x, y| x.norm_squared().total_cmp(&y.norm_squared()))?;
    let norm = best.norm();
    if !(norm > 0.0) {
        return None;
    }
    Some(([lo, mid, hi], best / norm))
}

/// Flips `normal` so that it points along `gravity`. When the normal is
/// perpendicular to gravity the sign makes x non-negative, then y.
pub fn orient_normal(normal: Vector3, gravity: &Vector3) -> Vector3 {
    let along = normal.dot(gravity);
    let flip = if along.abs() > ORIENT_TIE_EPS {
        along < 0.0
    } else if normal.x.abs() > ORIENT_TIE_EPS {
        normal.x < 0.0
    } else if normal.y.abs() > ORIENT_TIE_EPS {
        normal.y < 0.0
    } else {
        normal.z < 0.0
    };
    if flip {
        -normal
    } else {
        normal
    }
}
