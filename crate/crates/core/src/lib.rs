//! Rigid-body geometry on SO(3) and SE(3).
//!
//! - [`so3`]: rotation matrices, scalar-first unit quaternions, rotation
//!   vectors and Euler angles, with conversions, exp/log and projection onto
//!   the manifold.
//! - [`se3`]: rigid transforms, twists and wrenches, exp/log and adjoints.
//! - [`calibration`]: point-set registration, pivot calibration and
//!   hand-eye (`AX = XB`) calibration.
//! - [`batch`]: slice-level evaluation, parallel when the `parallel` feature
//!   is enabled.
//!
//! Linear algebra comes from `nalgebra`; its fixed-size types are re-exported.

pub mod batch;
pub mod calibration;
pub mod error;
pub mod se3;
pub mod so3;

pub use nalgebra::{Matrix3, Matrix4, Matrix6, Vector3, Vector6};

pub use calibration::{
    hand_eye_calibrate, pivot_calibrate, register_point_sets, HandEyeResult, PivotResult, PoseSample,
    RegistrationResult,
};
pub use error::{GeometryError, Result};
pub use se3::{
    adjoint, adjoint_apply_twist, compose, from_matrix4, inverse, se3_exp, se3_log, to_matrix4, transform_direction,
    transform_point, transform_wrench, AdjointMatrix, Transform, Twist, Wrench,
};
pub use so3::{
    euler_to_matrix, geodesic_distance, hat3, matrix_to_euler, matrix_to_quat, orthonormalize, quat_compose,
    quat_inverse, quat_to_matrix, rotate, so3_exp, so3_log, vee3, EulerAngles, EulerConvention, EulerDecomposition,
    RotationMatrix, RotationVector, UnitQuaternion,
};
