//! Multi-resolution planar region extraction from unordered point clouds.
//!
//! The pipeline labels every point as horizontal- or vertical-leaning from its
//! local surface normal, organizes the labeled points in a fixed-extent octree,
//! and walks the tree breadth-first. Each node is either divided, conquered as
//! a plane candidate, or handed to a residual list. Candidates are merged into
//! coplanar planes using second-moment statistics, so a merge never touches
//! member points. Residual points are finally attached to the nearest plane.
//!
//! Besides the segmenter the crate ships the supporting pieces needed to
//! evaluate it: point cloud I/O and sampling, a synthetic terrain generator
//! with ground truth, evaluation metrics, a RANSAC baseline and a small
//! benchmark harness.

pub mod bench;
pub mod classify;
pub mod config;
mod error;
pub mod io;
mod knn;
pub mod linalg;
pub mod metrics;
pub mod octree;
pub mod ransac;
pub mod segmenter;
pub mod synth;
pub mod types;

pub use config::SegmenterConfig;
pub use error::{Error, Result};
pub use types::{Category, LabeledCloud, Plane, Point3, Vector3};
