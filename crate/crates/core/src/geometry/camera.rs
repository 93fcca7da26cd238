//! Calibrated pinhole cameras and rigs.

use std::path::Path;

use nalgebra::{Matrix3, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Depth below which a projection is considered degenerate, in mm.
pub const MIN_PROJECTION_DEPTH_MM: f64 = 1e-6;

/// Maximum tolerated deviation of RᵀR from the identity.
pub const ROTATION_ORTHONORMALITY_TOL: f64 = 1e-9;

/// A calibrated pinhole camera. World→camera mapping is `p_cam = R·p_world + t`,
/// with translation in millimeters.
#[derive(Debug, Clone, PartialEq)]
pub struct Camera {
    pub id: String,
    /// Intrinsic matrix in pixels; zero lower triangle, positive focal entries.
    pub intrinsics: Matrix3<f64>,
    /// World→camera rotation, orthonormal.
    pub rotation: Matrix3<f64>,
    /// World→camera translation, mm.
    pub translation: Vector3<f64>,
    /// Image size (width, height) in pixels.
    pub image_size: (usize, usize),
}

impl Camera {
    /// Validates the invariants and builds a camera.
    pub fn new(
        id: impl Into<String>,
        intrinsics: Matrix3<f64>,
        rotation: Matrix3<f64>,
        translation: Vector3<f64>,
        image_size: (usize, usize),
    ) -> Result<Self> {
        let gram = rotation.transpose() * rotation;
        let dev = (gram - Matrix3::identity()).abs().max();
        if dev > ROTATION_ORTHONORMALITY_TOL {
            return Err(Error::Config(format!(
                "camera {:?}: rotation not orthonormal (|R'R - I| = {dev:.3e})",
                id.into()
            )));
        }
        let id = id.into();
        if intrinsics[(0, 0)] <= 0.0 || intrinsics[(1, 1)] <= 0.0 {
            return Err(Error::Config(format!(
                "camera {id:?}: focal entries must be positive"
            )));
        }
        if intrinsics[(1, 0)] != 0.0 || intrinsics[(2, 0)] != 0.0 || intrinsics[(2, 1)] != 0.0 {
            return Err(Error::Config(format!(
                "camera {id:?}: intrinsics lower triangle must be zero"
            )));
        }
        if image_size.0 == 0 || image_size.1 == 0 {
            return Err(Error::Config(format!(
                "camera {id:?}: image size must be positive"
            )));
        }
        Ok(Self {
            id,
            intrinsics,
            rotation,
            translation,
            image_size,
        })
    }

    /// Camera center in world coordinates (mm): the point with zero camera-frame
    /// coordinates, `-Rᵀ·t`.
    pub fn center(&self) -> Vector3<f64> {
        -self.rotation.transpose() * self.translation
    }

    /// Builds a camera at `position` looking at `target`, world z up. Falls back
    /// to x-up when the viewing axis is vertical.
    pub fn look_at(
        id: impl Into<String>,
        intrinsics: Matrix3<f64>,
        position: Vector3<f64>,
        target: Vector3<f64>,
        image_size: (usize, usize),
    ) -> Result<Self> {
        let forward = (target - position).normalize();
        let mut up = Vector3::z();
        if forward.cross(&up).norm() < 1e-6 {
            up = Vector3::x();
        }
        let right = forward.cross(&up).normalize();
        let down = forward.cross(&right).normalize();
        // Camera frame: x right, y down, z forward.
        let rotation = Matrix3::from_rows(&[
            right.transpose(),
            down.transpose(),
            forward.transpose(),
        ]);
        let translation = -rotation * position;
        Self::new(id, intrinsics, rotation, translation, image_size)
    }
}

/// Perspective projection of a world point: returns the pixel position and the
/// camera-frame depth in mm.
pub fn project_point(camera: &Camera, point: Vector3<f64>) -> Result<(Vector2<f64>, f64)> {
    let cam = camera.rotation * point + camera.translation;
    let depth = cam.z;
    if depth.abs() < MIN_PROJECTION_DEPTH_MM {
        return Err(Error::DegenerateDepth {
            depth,
            min: MIN_PROJECTION_DEPTH_MM,
        });
    }
    let homog = camera.intrinsics * cam;
    Ok((Vector2::new(homog.x / depth, homog.y / depth), depth))
}

/// A set of calibrated cameras sharing a clock.
#[derive(Debug, Clone)]
pub struct CameraRig {
    pub cameras: Vec<Camera>,
    /// Frame rate, Hz.
    pub frame_rate: f64,
}

impl CameraRig {
    pub fn new(cameras: Vec<Camera>, frame_rate: f64) -> Result<Self> {
        if cameras.is_empty() {
            return Err(Error::EmptyRig);
        }
        for i in 1..cameras.len() {
            if cameras[..i].iter().any(|c| c.id == cameras[i].id) {
                return Err(Error::Config(format!(
                    "duplicate camera id {:?}",
                    cameras[i].id
                )));
            }
        }
        if !(frame_rate > 0.0) {
            return Err(Error::Config(format!(
                "frame rate must be positive, got {frame_rate}"
            )));
        }
        Ok(Self {
            cameras,
            frame_rate,
        })
    }

    pub fn len(&self) -> usize {
        self.cameras.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cameras.is_empty()
    }

    /// Restricts the rig to the first `n` cameras (camera-count ablations).
    pub fn take(&self, n: usize) -> Result<Self> {
        Self::new(self.cameras.iter().take(n).cloned().collect(), self.frame_rate)
    }

    /// Reads a rig from a `rig.json` calibration file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: RigFile = serde_json::from_str(&text)
            .map_err(|e| Error::parse(path, e.to_string()))?;
        file.into_rig()
            .map_err(|e| Error::parse(path, e.to_string()))
    }

    /// Writes the rig as `rig.json` (row-major matrices, mm units).
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = RigFile::from_rig(self);
        let text = serde_json::to_string_pretty(&file)
            .map_err(|e| Error::parse(path, e.to_string()))?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

#[derive(Serialize, Deserialize)]
struct RigFile {
    cameras: Vec<CameraEntry>,
    fps: f64,
}

#[derive(Serialize, Deserialize)]
struct CameraEntry {
    id: String,
    #[serde(rename = "K")]
    k: [[f64; 3]; 3],
    #[serde(rename = "R")]
    r: [[f64; 3]; 3],
    t: [f64; 3],
    width: usize,
    height: usize,
}

impl RigFile {
    fn from_rig(rig: &CameraRig) -> Self {
        let cameras = rig
            .cameras
            .iter()
            .map(|c| {
                let row = |m: &Matrix3<f64>, i: usize| [m[(i, 0)], m[(i, 1)], m[(i, 2)]];
                CameraEntry {
                    id: c.id.clone(),
                    k: [
                        row(&c.intrinsics, 0),
                        row(&c.intrinsics, 1),
                        row(&c.intrinsics, 2),
                    ],
                    r: [row(&c.rotation, 0), row(&c.rotation, 1), row(&c.rotation, 2)],
                    t: [c.translation.x, c.translation.y, c.translation.z],
                    width: c.image_size.0,
                    height: c.image_size.1,
                }
            })
            .collect();
        RigFile {
            cameras,
            fps: rig.frame_rate,
        }
    }

    fn into_rig(self) -> Result<CameraRig> {
        let cameras = self
            .cameras
            .into_iter()
            .map(|e| {
                Camera::new(
                    e.id,
                    Matrix3::from_row_slice(&e.k.concat()),
                    Matrix3::from_row_slice(&e.r.concat()),
                    Vector3::new(e.t[0], e.t[1], e.t[2]),
                    (e.width, e.height),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        CameraRig::new(cameras, self.fps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn simple_camera() -> Camera {
        Camera::new(
            "cam0",
            Matrix3::new(1000.0, 0.0, 500.0, 0.0, 1000.0, 500.0, 0.0, 0.0, 1.0),
            Matrix3::identity(),
            Vector3::zeros(),
            (1000, 1000),
        )
        .unwrap()
    }

    #[test]
    fn principal_axis_point_hits_principal_point() {
        let cam = simple_camera();
        let (px, depth) = project_point(&cam, Vector3::new(0.0, 0.0, 2000.0)).unwrap();
        assert_relative_eq!(px.x, 500.0);
        assert_relative_eq!(px.y, 500.0);
        assert_relative_eq!(depth, 2000.0);
    }

    #[test]
    fn projection_matches_homogeneous_oracle() {
        // Oracle: 3x4 homogeneous projection matrix applied to [x y z 1].
        let cam = simple_camera();
        let point = Vector3::new(2000.0, 0.0, 2000.0);
        let (px, _) = project_point(&cam, point).unwrap();

        let mut p = [[0.0f64; 4]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    p[i][j] += cam.intrinsics[(i, k)] * cam.rotation[(k, j)];
                }
            }
            for k in 0..3 {
                p[i][3] += cam.intrinsics[(i, k)] * cam.translation[k];
            }
        }
        let hom = [point.x, point.y, point.z, 1.0];
        let mut proj = [0.0f64; 3];
        for i in 0..3 {
            for j in 0..4 {
                proj[i] += p[i][j] * hom[j];
            }
        }
        assert_relative_eq!(px.x, proj[0] / proj[2], max_relative = 1e-12);
        assert_relative_eq!(px.y, proj[1] / proj[2], max_relative = 1e-12);
        assert_relative_eq!(px.x, 1500.0);
        assert_relative_eq!(px.y, 500.0);
    }

    #[test]
    fn zero_depth_is_degenerate() {
        let cam = simple_camera();
        let err = project_point(&cam, Vector3::new(100.0, 50.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::DegenerateDepth { .. }));
    }

    #[test]
    fn non_orthonormal_rotation_rejected() {
        let mut r = Matrix3::identity();
        r[(0, 0)] = 1.1;
        let res = Camera::new(
            "bad",
            Matrix3::new(1000.0, 0.0, 500.0, 0.0, 1000.0, 500.0, 0.0, 0.0, 1.0),
            r,
            Vector3::zeros(),
            (640, 480),
        );
        assert!(res.is_err());
    }

    #[test]
    fn duplicate_camera_ids_rejected() {
        let c = simple_camera();
        let res = CameraRig::new(vec![c.clone(), c], 30.0);
        assert!(res.is_err());
    }

    #[test]
    fn look_at_projects_target_to_principal_point() {
        let k = Matrix3::new(800.0, 0.0, 320.0, 0.0, 800.0, 240.0, 0.0, 0.0, 1.0);
        let pos = Vector3::new(3000.0, -2000.0, 2500.0);
        let target = Vector3::new(0.0, 0.0, 1000.0);
        let cam = Camera::look_at("c", k, pos, target, (640, 480)).unwrap();
        let (px, depth) = project_point(&cam, target).unwrap();
        assert_relative_eq!(px.x, 320.0, epsilon = 1e-9);
        assert_relative_eq!(px.y, 240.0, epsilon = 1e-9);
        assert_relative_eq!(depth, (target - pos).norm(), epsilon = 1e-9);
        assert_relative_eq!((cam.center() - pos).norm(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn rig_json_round_trip() {
        let dir = std::env::temp_dir().join("posegrid_rig_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("rig.json");
        let rig = CameraRig::new(vec![simple_camera()], 30.0).unwrap();
        rig.save(&path).unwrap();
        let loaded = CameraRig::load(&path).unwrap();
        assert_eq!(loaded.cameras.len(), 1);
        assert_eq!(loaded.cameras[0], rig.cameras[0]);
        assert_eq!(loaded.frame_rate, 30.0);
    }
}
