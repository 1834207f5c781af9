//! Point cloud files, depth-image back-projection and downsampling.

mod depth;
mod planes;
mod ply;
mod sampling;
mod xyz;

use std::path::Path;

pub use depth::{backproject, load_depth_frame, CameraIntrinsics, DepthFrame};
pub use planes::{parse_planes, planes_to_text, read_planes, write_planes, PlaneRecord};
pub use ply::{read_ply, write_ply, PlyData};
pub use sampling::{furthest_point_indices, furthest_point_sample, voxel_downsample, voxel_groups, voxel_key};
pub use xyz::{read_xyz, write_xyz};

use crate::{Error, LabeledCloud, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CloudFormat {
    PlyAscii,
    PlyBinaryLe,
    Xyz,
}

impl CloudFormat {
    /// Guess from the file extension: `.xyz`/`.txt` are xyz, everything else
    /// binary PLY.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("xyz") | Some("txt") => CloudFormat::Xyz,
            _ => CloudFormat::PlyBinaryLe,
        }
    }
}

/// 16-entry palette used to color plane ids; unassigned points are gray.
pub const PALETTE: [[u8; 3]; 16] = [
    [230, 25, 75],
    [60, 180, 75],
    [255, 225, 25],
    [0, 130, 200],
    [245, 130, 48],
    [145, 30, 180],
    [70, 240, 240],
    [240, 50, 230],
    [210, 245, 60],
    [250, 190, 212],
    [0, 128, 128],
    [220, 190, 255],
    [170, 110, 40],
    [255, 250, 200],
    [128, 0, 0],
    [170, 255, 195],
];
pub const UNASSIGNED_COLOR: [u8; 3] = [128, 128, 128];

pub fn plane_color(id: Option<u32>) -> [u8; 3] {
    match id {
        Some(id) => PALETTE[id as usize % PALETTE.len()],
        None => UNASSIGNED_COLOR,
    }
}

/// Reads a cloud. PLY files are parsed by their header (ascii or binary),
/// so `format` only distinguishes PLY from xyz.
pub fn read_cloud(path: &Path, format: CloudFormat) -> Result<LabeledCloud> {
    match format {
        CloudFormat::Xyz => read_xyz(path),
        CloudFormat::PlyAscii | CloudFormat::PlyBinaryLe => Ok(read_ply(path)?.cloud),
    }
}

/// Writes a cloud, optionally with a plane id per point.
pub fn write_cloud(
    cloud: &LabeledCloud,
    assignment: Option<&[Option<u32>]>,
    path: &Path,
    format: CloudFormat,
) -> Result<()> {
    if let Some(a) = assignment {
        if a.len() != cloud.len() {
            return Err(Error::LengthMismatch {
                expected: cloud.len(),
                actual: a.len(),
            });
        }
    }
    match format {
        CloudFormat::Xyz => write_xyz(cloud, path),
        CloudFormat::PlyAscii => write_ply(cloud, assignment, path, false),
        CloudFormat::PlyBinaryLe => write_ply(cloud, assignment, path, true),
    }
}
