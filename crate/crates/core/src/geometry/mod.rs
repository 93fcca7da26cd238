//! Camera models, workspace construction, feature unprojection, plane
//! projections, and feature warping. World units are millimeters throughout.

mod camera;
mod grid;
mod volume;

pub use camera::{
    project_point, Camera, CameraRig, MIN_PROJECTION_DEPTH_MM, ROTATION_ORTHONORMALITY_TOL,
};
pub use grid::{build_workspace, VoxelGrid, DEFAULT_PITCH_MM, WORKSPACE_HEIGHT_MM};
pub use volume::{
    bev_project, bilinear_sample, triplane_project, unproject_features, unproject_features_with,
    warp_plane, FeatureVolume, PlaneAxes, PlaneFeature, ProjectionTable, UnprojectOptions,
};

pub(crate) use volume::bilinear_accumulate;
