//! Feature volumes, plane features, and the sampling operations that connect
//! them: multi-view unprojection, max-projections, and translational warps.

use nalgebra::{Vector2, Vector3};
use ndarray::{Array3, Array4};

use crate::error::{Error, Result};
use crate::geometry::{CameraRig, VoxelGrid, MIN_PROJECTION_DEPTH_MM};

/// Which world plane a [`PlaneFeature`] lies in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaneAxes {
    /// rows = x cells, cols = y cells.
    Xy,
    /// rows = x cells, cols = z cells.
    Xz,
    /// rows = y cells, cols = z cells.
    Yz,
    /// Top-down view of the shared workspace; rows = x cells, cols = y cells.
    Bev,
    /// Camera image space; rows = pixel v, cols = pixel u.
    Image,
}

/// A dense 2D feature map with a channel dimension.
///
/// Data is laid out `[rows, cols, channels]`. `pitch` converts cells to mm for
/// world-plane maps and is 1.0 for image-space maps. `world_anchor` is the
/// world position the map is referenced to (grid origin or cube center).
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneFeature {
    pub axes: PlaneAxes,
    pub data: Array3<f64>,
    pub world_anchor: Vector3<f64>,
    pub pitch: f64,
}

impl PlaneFeature {
    pub fn zeros(
        axes: PlaneAxes,
        extent: (usize, usize),
        channels: usize,
        world_anchor: Vector3<f64>,
        pitch: f64,
    ) -> Self {
        Self {
            axes,
            data: Array3::zeros((extent.0, extent.1, channels)),
            world_anchor,
            pitch,
        }
    }

    /// (rows, cols).
    pub fn extent(&self) -> (usize, usize) {
        let s = self.data.shape();
        (s[0], s[1])
    }

    pub fn channels(&self) -> usize {
        self.data.shape()[2]
    }

    /// Row-major view of one channel, useful for heatmap-style access.
    pub fn channel(&self, c: usize) -> ndarray::ArrayView2<'_, f64> {
        self.data.index_axis(ndarray::Axis(2), c)
    }
}

/// Dense per-voxel features over a [`VoxelGrid`], laid out `[x, y, z, channel]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVolume {
    pub grid: VoxelGrid,
    pub data: Array4<f64>,
}

impl FeatureVolume {
    pub fn zeros(grid: VoxelGrid, channels: usize) -> Self {
        let (nx, ny, nz) = grid.dims;
        Self {
            grid,
            data: Array4::zeros((nx, ny, nz, channels)),
        }
    }

    pub fn channels(&self) -> usize {
        self.data.shape()[3]
    }
}

/// Standard 4-neighbor bilinear interpolation of all channels at a continuous
/// `(row, col)` position. Samples outside the map read as zero, so a point at
/// least one cell outside the extent yields the zero vector.
pub fn bilinear_sample(map: &PlaneFeature, point: Vector2<f64>) -> Vec<f64> {
    let channels = map.channels();
    let mut out = vec![0.0; channels];
    bilinear_sample_into(map, point, &mut out);
    out
}

/// As [`bilinear_sample`] but accumulating into `out += sample`.
pub(crate) fn bilinear_accumulate(map: &PlaneFeature, point: Vector2<f64>, out: &mut [f64]) {
    let (rows, cols) = map.extent();
    let channels = map.channels();
    debug_assert_eq!(out.len(), channels);
    let r0 = point.x.floor();
    let c0 = point.y.floor();
    let fr = point.x - r0;
    let fc = point.y - c0;
    let data = map.data.as_slice().expect("plane data is contiguous");
    let row_stride = cols * channels;
    let mut tap = |ri: f64, ci: f64, w: f64| {
        if w == 0.0 || ri < 0.0 || ci < 0.0 {
            return;
        }
        let (ri, ci) = (ri as usize, ci as usize);
        if ri >= rows || ci >= cols {
            return;
        }
        let base = ri * row_stride + ci * channels;
        for ch in 0..channels {
            out[ch] += w * data[base + ch];
        }
    };
    tap(r0, c0, (1.0 - fr) * (1.0 - fc));
    tap(r0, c0 + 1.0, (1.0 - fr) * fc);
    tap(r0 + 1.0, c0, fr * (1.0 - fc));
    tap(r0 + 1.0, c0 + 1.0, fr * fc);
}

fn bilinear_sample_into(map: &PlaneFeature, point: Vector2<f64>, out: &mut [f64]) {
    out.fill(0.0);
    bilinear_accumulate(map, point, out);
}

/// Options for [`unproject_features_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct UnprojectOptions {
    /// Average over views whose projection lands in front of the camera and on
    /// the image, instead of the plain sum over all views.
    pub average_valid_views: bool,
}

/// Lifts per-view image-space feature maps into a voxel volume: every voxel
/// center is projected into each camera and the bilinear samples are summed in
/// fixed camera order. Projections behind a camera or off the image contribute
/// zero.
pub fn unproject_features(
    views: &[PlaneFeature],
    rig: &CameraRig,
    grid: &VoxelGrid,
) -> Result<FeatureVolume> {
    unproject_features_with(views, rig, grid, UnprojectOptions::default())
}

/// [`unproject_features`] with explicit [`UnprojectOptions`].
pub fn unproject_features_with(
    views: &[PlaneFeature],
    rig: &CameraRig,
    grid: &VoxelGrid,
    options: UnprojectOptions,
) -> Result<FeatureVolume> {
    if views.len() != rig.cameras.len() {
        return Err(Error::LengthMismatch {
            expected: rig.cameras.len(),
            got: views.len(),
        });
    }
    let channels = match views.first() {
        Some(v) => v.channels(),
        None => return Err(Error::EmptyRig),
    };
    for v in views {
        if v.channels() != channels {
            return Err(Error::ChannelMismatch {
                expected: channels,
                got: v.channels(),
            });
        }
    }

    let (nx, ny, nz) = grid.dims;
    let mut volume = FeatureVolume::zeros(grid.clone(), channels);
    let mut sample = vec![0.0f64; channels];
    for i in 0..nx {
        for j in 0..ny {
            for k in 0..nz {
                let center = grid.voxel_center(i, j, k);
                let mut valid = 0usize;
                sample.fill(0.0);
                for (cam, view) in rig.cameras.iter().zip(views) {
                    let p_cam = cam.rotation * center + cam.translation;
                    if p_cam.z < MIN_PROJECTION_DEPTH_MM {
                        continue;
                    }
                    let u = (cam.intrinsics[(0, 0)] * p_cam.x
                        + cam.intrinsics[(0, 1)] * p_cam.y
                        + cam.intrinsics[(0, 2)] * p_cam.z)
                        / p_cam.z;
                    let v = (cam.intrinsics[(1, 1)] * p_cam.y
                        + cam.intrinsics[(1, 2)] * p_cam.z)
                        / p_cam.z;
                    let (rows, cols) = view.extent();
                    if v > -1.0 && u > -1.0 && v < rows as f64 && u < cols as f64 {
                        valid += 1;
                    }
                    // Image maps index [v, u].
                    bilinear_accumulate(view, Vector2::new(v, u), &mut sample);
                }
                if options.average_valid_views && valid > 0 {
                    for s in sample.iter_mut() {
                        *s /= valid as f64;
                    }
                }
                let mut cell = volume.data.slice_mut(ndarray::s![i, j, k, ..]);
                for (dst, &src) in cell.iter_mut().zip(sample.iter()) {
                    *dst = src;
                }
            }
        }
    }
    Ok(volume)
}

/// Top-down max-projection of a volume: `out[x, y, c] = max_z volume[x, y, z, c]`.
pub fn bev_project(volume: &FeatureVolume) -> PlaneFeature {
    let (nx, ny, nz) = volume.grid.dims;
    let channels = volume.channels();
    let mut plane = PlaneFeature::zeros(
        PlaneAxes::Bev,
        (nx, ny),
        channels,
        volume.grid.origin,
        volume.grid.pitch,
    );
    for i in 0..nx {
        for j in 0..ny {
            for c in 0..channels {
                let mut best = f64::NEG_INFINITY;
                for k in 0..nz {
                    best = best.max(volume.data[[i, j, k, c]]);
                }
                plane.data[[i, j, c]] = best;
            }
        }
    }
    plane
}

/// Max-projections of a cube onto the xy, xz, and yz planes (the same max
/// reduction as the BEV projection, applied along the omitted axis).
pub fn triplane_project(cube: &FeatureVolume) -> (PlaneFeature, PlaneFeature, PlaneFeature) {
    let (nx, ny, nz) = cube.grid.dims;
    let channels = cube.channels();
    let anchor = cube.grid.origin;
    let pitch = cube.grid.pitch;
    let mut xy = PlaneFeature::zeros(PlaneAxes::Xy, (nx, ny), channels, anchor, pitch);
    let mut xz = PlaneFeature::zeros(PlaneAxes::Xz, (nx, nz), channels, anchor, pitch);
    let mut yz = PlaneFeature::zeros(PlaneAxes::Yz, (ny, nz), channels, anchor, pitch);
    xy.data.fill(f64::NEG_INFINITY);
    xz.data.fill(f64::NEG_INFINITY);
    yz.data.fill(f64::NEG_INFINITY);
    for i in 0..nx {
        for j in 0..ny {
            for k in 0..nz {
                for c in 0..channels {
                    let v = cube.data[[i, j, k, c]];
                    if v > xy.data[[i, j, c]] {
                        xy.data[[i, j, c]] = v;
                    }
                    if v > xz.data[[i, k, c]] {
                        xz.data[[i, k, c]] = v;
                    }
                    if v > yz.data[[j, k, c]] {
                        yz.data[[j, k, c]] = v;
                    }
                }
            }
        }
    }
    (xy, xz, yz)
}

/// Re-expresses a plane in a coordinate frame translated by `displacement`
/// (mm along the plane's row and column axes): `out[p] = in(p + d/pitch)`,
/// resampled bilinearly with zero fill where the source has no support. The
/// stored content thus appears shifted by `-displacement/pitch` cells.
pub fn warp_plane(feature: &PlaneFeature, displacement: Vector2<f64>) -> PlaneFeature {
    let (rows, cols) = feature.extent();
    let channels = feature.channels();
    let dr = displacement.x / feature.pitch;
    let dc = displacement.y / feature.pitch;
    let mut out = PlaneFeature::zeros(
        feature.axes,
        (rows, cols),
        channels,
        feature.world_anchor,
        feature.pitch,
    );
    let mut sample = vec![0.0f64; channels];
    for r in 0..rows {
        for c in 0..cols {
            bilinear_sample_into(
                feature,
                Vector2::new(r as f64 + dr, c as f64 + dc),
                &mut sample,
            );
            let mut cell = out.data.slice_mut(ndarray::s![r, c, ..]);
            for (dst, &src) in cell.iter_mut().zip(sample.iter()) {
                *dst = src;
            }
        }
    }
    out
}

/// Precomputed voxel-to-pixel projections for a fixed rig and grid. The rig
/// and workspace do not change across frames, so the per-voxel projection
/// geometry can be computed once and reused every frame.
pub struct ProjectionTable {
    dims: (usize, usize, usize),
    /// Per camera, per voxel (x-major, then y, then z): projected (v, u) pixel
    /// position, or NAN markers when the voxel is behind the camera.
    samples: Vec<Vec<(f32, f32)>>,
}

impl ProjectionTable {
    pub fn new(rig: &CameraRig, grid: &VoxelGrid) -> Self {
        let (nx, ny, nz) = grid.dims;
        let mut samples = Vec::with_capacity(rig.cameras.len());
        for cam in &rig.cameras {
            let mut per_cam = Vec::with_capacity(nx * ny * nz);
            for i in 0..nx {
                for j in 0..ny {
                    for k in 0..nz {
                        let p_cam = cam.rotation * grid.voxel_center(i, j, k) + cam.translation;
                        if p_cam.z < MIN_PROJECTION_DEPTH_MM {
                            per_cam.push((f32::NAN, f32::NAN));
                            continue;
                        }
                        let u = (cam.intrinsics[(0, 0)] * p_cam.x
                            + cam.intrinsics[(0, 1)] * p_cam.y
                            + cam.intrinsics[(0, 2)] * p_cam.z)
                            / p_cam.z;
                        let v = (cam.intrinsics[(1, 1)] * p_cam.y
                            + cam.intrinsics[(1, 2)] * p_cam.z)
                            / p_cam.z;
                        per_cam.push((v as f32, u as f32));
                    }
                }
            }
            samples.push(per_cam);
        }
        Self {
            dims: grid.dims,
            samples,
        }
    }

    /// Unprojects a single channel of each view into a `[x, y, z]` volume using
    /// the cached projections. `out` must have the table's dimensions.
    pub fn unproject_channel(
        &self,
        views: &[PlaneFeature],
        channel: usize,
        out: &mut Array3<f64>,
    ) -> Result<()> {
        if views.len() != self.samples.len() {
            return Err(Error::LengthMismatch {
                expected: self.samples.len(),
                got: views.len(),
            });
        }
        let (nx, ny, nz) = self.dims;
        if out.shape() != [nx, ny, nz] {
            return Err(Error::ShapeMismatch {
                expected: format!("{:?}", (nx, ny, nz)),
                got: format!("{:?}", out.shape()),
            });
        }
        out.fill(0.0);
        let flat = out.as_slice_mut().expect("volume data is contiguous");
        for (view, per_cam) in views.iter().zip(&self.samples) {
            let (rows, cols) = view.extent();
            let channels = view.channels();
            let data = view.data.as_slice().expect("plane data is contiguous");
            let row_stride = cols * channels;
            for (dst, &(v, u)) in flat.iter_mut().zip(per_cam.iter()) {
                if v.is_nan() {
                    continue;
                }
                let (v, u) = (v as f64, u as f64);
                let r0 = v.floor();
                let c0 = u.floor();
                let fr = v - r0;
                let fc = u - c0;
                let mut acc = 0.0;
                let mut tap = |ri: f64, ci: f64, w: f64| {
                    if ri < 0.0 || ci < 0.0 {
                        return;
                    }
                    let (ri, ci) = (ri as usize, ci as usize);
                    if ri >= rows || ci >= cols {
                        return;
                    }
                    acc += w * data[ri * row_stride + ci * channels + channel];
                };
                tap(r0, c0, (1.0 - fr) * (1.0 - fc));
                tap(r0, c0 + 1.0, (1.0 - fr) * fc);
                tap(r0 + 1.0, c0, fr * (1.0 - fc));
                tap(r0 + 1.0, c0 + 1.0, fr * fc);
                *dst += acc;
            }
        }
        Ok(())
    }
}
