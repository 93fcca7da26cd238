//! Crate-wide error type.

use std::path::PathBuf;

/// Errors produced by the pipeline and its building blocks.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A point projected with a camera-frame depth too close to zero.
    #[error("degenerate projection depth {depth} mm (|depth| < {min} mm)")]
    DegenerateDepth { depth: f64, min: f64 },

    /// A camera rig with no cameras cannot define a workspace.
    #[error("camera rig is empty")]
    EmptyRig,

    /// Feature maps fed to a multi-view operation disagree on channel count.
    #[error("channel mismatch: expected {expected}, got {got}")]
    ChannelMismatch { expected: usize, got: usize },

    /// Gaussian rendering needs a strictly positive sigma.
    #[error("sigma must be > 0, got {sigma}")]
    NonPositiveSigma { sigma: f64 },

    /// Soft-argmax is undefined on a heatmap with no positive cell.
    #[error("heatmap has no positive cell")]
    AllZeroHeatmap,

    /// Two arrays that must agree in shape do not.
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },

    /// A Kalman covariance lost positive semi-definiteness.
    #[error("covariance not positive semi-definite (min eigenvalue {min_eigenvalue:.3e})")]
    NonPsdCovariance { min_eigenvalue: f64 },

    /// Aligned sequences of unequal length.
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// Plane fusion received weights that are all zero.
    #[error("all plane weights are zero")]
    AllZeroWeights,

    /// A generated trajectory left the workspace.
    #[error("trajectory exits the workspace at frame {frame}, person {person}: ({x:.1}, {y:.1}, {z:.1}) mm")]
    WorkspaceOverflow {
        frame: usize,
        person: usize,
        x: f64,
        y: f64,
        z: f64,
    },

    /// Invalid run configuration.
    #[error("config error: {0}")]
    Config(String),

    /// An I/O failure, annotated with the file it concerns.
    #[error("io error on {path:?}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A file held syntactically invalid content.
    #[error("parse error in {path:?}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
