//! Deterministic multi-view volumetric human pose pipeline.
//!
//! Per-view joint heatmaps (synthetic stand-ins for learned backbones) are
//! lifted into a shared voxel volume, people are detected on the bird's-eye
//! view, tracked with a Kalman filter and Hungarian association, fused over
//! time with a convolutional GRU on warped tri-plane features, decoded into
//! 3D skeletons, and forecast into future frames. A full metric suite (MPJPE,
//! AP, PCP3D, MOTA/IDF1, forecast error) and a benchmark harness round out
//! the pipeline.

pub mod error;
pub mod geometry;
pub mod heatmap;

pub use error::{Error, Result};
pub use geometry::{
    bev_project, bilinear_sample, build_workspace, project_point, triplane_project,
    unproject_features, warp_plane, Camera, CameraRig, FeatureVolume, PlaneAxes, PlaneFeature,
    VoxelGrid,
};
pub use heatmap::{
    peak_1d, render_gaussian, render_gaussian_1d, soft_argmax, soft_argmax_1d, top_k_peaks,
    Heatmap1D, Heatmap2D, Peak,
};
