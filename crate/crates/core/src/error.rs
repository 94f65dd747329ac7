use thiserror::Error;

/// Failures raised by the geometry and calibration routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("matrix is not skew-symmetric (|S + S^T|_F = {asymmetry:.3e})")]
    NotSkewSymmetric { asymmetry: f64 },

    #[error("matrix is not a rotation (orthogonality error {orthogonality:.3e}, det {det:.12})")]
    NotARotation { orthogonality: f64, det: f64 },

    #[error("quaternion norm {norm:.9} deviates from 1")]
    NotUnitQuaternion { norm: f64 },

    #[error("unsupported Euler convention `{0}`")]
    UnsupportedConvention(String),

    #[error("matrix cannot be projected onto SO(3): {reason}")]
    DegenerateMatrix { reason: String },

    #[error("homogeneous matrix last row must be (0, 0, 0, 1), got {row:?}")]
    InvalidHomogeneousRow { row: [f64; 4] },

    #[error("need at least {required} points, got {got}")]
    TooFewPoints { required: usize, got: usize },

    #[error("need at least {required} poses, got {got}")]
    TooFewPoses { required: usize, got: usize },

    #[error("need at least {required} motion pairs, got {got}")]
    TooFewMotions { required: usize, got: usize },

    #[error("input lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("degenerate motion: {0}")]
    DegenerateMotion(String),
}

impl GeometryError {
    /// True for the errors caused by insufficiently informative input
    /// (collinear points, missing rotational diversity, singular matrices).
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            GeometryError::DegenerateGeometry(_)
                | GeometryError::DegenerateMotion(_)
                | GeometryError::DegenerateMatrix { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, GeometryError>;
