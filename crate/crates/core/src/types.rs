//! Shared domain vocabulary: points, categories, labeled clouds and planes.

use nalgebra::Matrix3;

use crate::linalg;
use crate::{Error, Result};

pub type Point3 = nalgebra::Point3<f64>;
pub type Vector3 = nalgebra::Vector3<f64>;

/// Inclination class of a point relative to the gravity baseline.
///
/// `H` marks points whose surface normal lies within 45 degrees of gravity
/// (treads, floors), `V` everything steeper (risers, walls).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    H,
    V,
}

impl Category {
    pub fn as_u8(self) -> u8 {
        match self {
            Category::H => 0,
            Category::V => 1,
        }
    }

    pub fn from_u8(value: u8) -> Option<Self> {
        match value {
            0 => Some(Category::H),
            1 => Some(Category::V),
            _ => None,
        }
    }
}

/// Points with optional per-point categories.
///
/// Coordinates are guaranteed finite; labels, when present, match the point
/// count.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LabeledCloud {
    points: Vec<Point3>,
    labels: Option<Vec<Category>>,
}

impl LabeledCloud {
    pub fn new(points: Vec<Point3>) -> Result<Self> {
        if let Some(index) = points.iter().position(|p| !p.coords.iter().all(|c| c.is_finite())) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            points,
            labels: None,
        })
    }

    pub fn with_labels(points: Vec<Point3>, labels: Vec<Category>) -> Result<Self> {
        Self::new(points)?.replace_labels(labels)
    }

    /// Returns the cloud with its labels replaced.
    pub fn replace_labels(mut self, labels: Vec<Category>) -> Result<Self> {
        if labels.len() != self.points.len() {
            return Err(Error::LengthMismatch {
                expected: self.points.len(),
                actual: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn without_labels(mut self) -> Self {
        self.labels = None;
        self
    }

    /// Every point receives the same category, which makes the purity test
    /// vacuous. Used for the without-classification ablation.
    pub fn with_uniform_labels(self, category: Category) -> Self {
        let n = self.points.len();
        Self {
            points: self.points,
            labels: Some(vec![category; n]),
        }
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn labels(&self) -> Option<&[Category]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Sub-cloud made of the given indices, in the given order.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            points: indices.iter().map(|&i| self.points[i]).collect(),
            labels: self
                .labels
                .as_ref()
                .map(|l| indices.iter().map(|&i| l[i]).collect()),
        }
    }

    /// Applies `f` to every point. Non-finite results are rejected.
    pub fn map_points(&self, f: impl Fn(&Point3) -> Point3) -> Result<Self> {
        let points = self.points.iter().map(f).collect();
        let mut out = Self::new(points)?;
        out.labels = self.labels.clone();
        Ok(out)
    }

    pub fn into_parts(self) -> (Vec<Point3>, Option<Vec<Category>>) {
        (self.points, self.labels)
    }
}

/// A planar region: its member indices and the statistics needed to merge it
/// with another region in constant time.
///
/// `second_moment` is the raw sum of outer products `Σ p pᵀ` of the members,
/// which together with the count and centroid reconstructs the scatter matrix
/// as `Σ p pᵀ − N μ μᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    pub(crate) point_indices: Vec<u32>,
    pub(crate) centroid: Point3,
    pub(crate) normal: Vector3,
    pub(crate) normal_scatter: f64,
    pub(crate) second_moment: Matrix3<f64>,
}

impl Plane {
    /// Builds a plane from its statistics. `scatter` is the centered scatter
    /// matrix `Σ (p − μ)(p − μ)ᵀ` whose smallest eigenpair gives the normal.
    pub(crate) fn from_statistics(
        point_indices: Vec<u32>,
        centroid: Point3,
        second_moment: Matrix3<f64>,
        scatter: Matrix3<f64>,
        gravity: &Vector3,
    ) -> Self {
        let eig = linalg::SymEigen3::new(&scatter);
        let normal = linalg::orient_normal(eig.vectors[0], gravity);
        Self {
            point_indices,
            centroid,
            normal,
            normal_scatter: eig.values[0].max(0.0),
            second_moment: symmetrize(second_moment),
        }
    }

    pub fn point_indices(&self) -> &[u32] {
        &self.point_indices
    }

    pub fn count(&self) -> usize {
        self.point_indices.len()
    }

    pub fn centroid(&self) -> &Point3 {
        &self.centroid
    }

    pub fn normal(&self) -> &Vector3 {
        &self.normal
    }

    /// Mean squared residual along the normal, m².
    pub fn mse_normal(&self) -> f64 {
        self.normal_scatter / self.count() as f64
    }

    /// Smallest eigenvalue of the unnormalized scatter matrix, i.e. the sum of
    /// squared residuals along the normal, m².
    pub fn normal_scatter(&self) -> f64 {
        self.normal_scatter
    }

    pub fn second_moment(&self) -> &Matrix3<f64> {
        &self.second_moment
    }

    /// Centered scatter matrix reconstructed from the running moments.
    pub fn covariance(&self) -> Matrix3<f64> {
        let mu = self.centroid.coords;
        symmetrize(self.second_moment - (mu * mu.transpose()) * self.count() as f64)
    }

    /// Signed offset `d` of the implicit form `n·p + d = 0`.
    pub fn offset(&self) -> f64 {
        -self.normal.dot(&self.centroid.coords)
    }
}

pub(crate) fn symmetrize(m: Matrix3<f64>) -> Matrix3<f64> {
    (m + m.transpose()) * 0.5
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_points() {
        let err = LabeledCloud::new(vec![Point3::new(0.0, 0.0, 0.0), Point3::new(f64::NAN, 0.0, 0.0)])
            .unwrap_err();
        assert!(matches!(err, Error::NonFinite { index: 1 }));
    }

    #[test]
    fn label_length_must_match() {
        let err = LabeledCloud::with_labels(vec![Point3::origin()], vec![Category::H, Category::V])
            .unwrap_err();
        assert!(matches!(err, Error::LengthMismatch { expected: 1, actual: 2 }));
    }

    #[test]
    fn category_order_and_codes() {
        assert!(Category::H < Category::V);
        assert_eq!(Category::from_u8(Category::V.as_u8()), Some(Category::V));
        assert_eq!(Category::from_u8(7), None);
    }
}
