//! Discretized world space.

use nalgebra::Vector3;

use crate::error::Result;
use crate::geometry::CameraRig;

/// Fixed workspace height, mm.
pub const WORKSPACE_HEIGHT_MM: f64 = 2000.0;

/// Default voxel pitch, mm.
pub const DEFAULT_PITCH_MM: f64 = 100.0;

/// An axis-aligned voxel grid in world space.
#[derive(Debug, Clone, PartialEq)]
pub struct VoxelGrid {
    /// Min corner, mm.
    pub origin: Vector3<f64>,
    /// Edge length of a voxel, mm.
    pub pitch: f64,
    /// Voxel counts (nx, ny, nz).
    pub dims: (usize, usize, usize),
}

impl VoxelGrid {
    pub fn new(origin: Vector3<f64>, pitch: f64, dims: (usize, usize, usize)) -> Self {
        assert!(pitch > 0.0, "pitch must be positive");
        assert!(
            dims.0 >= 1 && dims.1 >= 1 && dims.2 >= 1,
            "dims must all be >= 1"
        );
        Self {
            origin,
            pitch,
            dims,
        }
    }

    /// World position of the center of voxel `(i, j, k)`.
    pub fn voxel_center(&self, i: usize, j: usize, k: usize) -> Vector3<f64> {
        self.origin
            + Vector3::new(
                (i as f64 + 0.5) * self.pitch,
                (j as f64 + 0.5) * self.pitch,
                (k as f64 + 0.5) * self.pitch,
            )
    }

    /// Continuous grid coordinates of a world point, in voxel-center units
    /// (voxel centers land on integers).
    pub fn world_to_cell(&self, p: Vector3<f64>) -> Vector3<f64> {
        (p - self.origin) / self.pitch - Vector3::new(0.5, 0.5, 0.5)
    }

    /// Inverse of [`world_to_cell`](Self::world_to_cell).
    pub fn cell_to_world(&self, cell: Vector3<f64>) -> Vector3<f64> {
        self.origin + (cell + Vector3::new(0.5, 0.5, 0.5)) * self.pitch
    }

    /// Whether a world point lies within the grid extent.
    pub fn contains(&self, p: Vector3<f64>) -> bool {
        let d = p - self.origin;
        d.x >= 0.0
            && d.y >= 0.0
            && d.z >= 0.0
            && d.x <= self.dims.0 as f64 * self.pitch
            && d.y <= self.dims.1 as f64 * self.pitch
            && d.z <= self.dims.2 as f64 * self.pitch
    }
}

/// Builds the shared workspace grid from camera extrinsics: the x/y span is the
/// top-down bounding box of the camera centers, centered at their mean; the z
/// span is `[0, 2000]` mm anchored at the floor. Degenerate x/y extents clamp
/// to one voxel so single-camera rigs stay runnable.
pub fn build_workspace(rig: &CameraRig, pitch: f64) -> Result<VoxelGrid> {
    assert!(pitch > 0.0, "pitch must be positive");
    if rig.cameras.is_empty() {
        return Err(crate::error::Error::EmptyRig);
    }

    let centers: Vec<Vector3<f64>> = rig.cameras.iter().map(|c| c.center()).collect();
    let n = centers.len() as f64;
    let mean_x = centers.iter().map(|c| c.x).sum::<f64>() / n;
    let mean_y = centers.iter().map(|c| c.y).sum::<f64>() / n;
    let span = |vals: Vec<f64>| -> f64 {
        let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        max - min
    };
    let span_x = span(centers.iter().map(|c| c.x).collect());
    let span_y = span(centers.iter().map(|c| c.y).collect());

    let cells = |s: f64| -> usize { ((s / pitch).ceil() as usize).max(1) };
    let nx = cells(span_x);
    let ny = cells(span_y);
    let nz = cells(WORKSPACE_HEIGHT_MM);

    let origin = Vector3::new(
        mean_x - nx as f64 * pitch / 2.0,
        mean_y - ny as f64 * pitch / 2.0,
        0.0,
    );
    Ok(VoxelGrid::new(origin, pitch, (nx, ny, nz)))
}
