//! Rigid-body motions: [`Transform`] as an element of SE(3), its exp/log
//! pair, and the adjoint action on twists and wrenches.
//!
//! Twists are ordered `(v, w)`, linear part first. With that ordering
//! `Ad_T = [[R, [t]× R], [0, R]]`, so `w' = R w` and `v' = R v + t × (R w)`.
//! Wrenches `(f, tau)` transform with the dual map so that the power
//! `f · v + tau · w` is frame independent.

use std::ops::Mul;

use nalgebra::{Matrix3, Matrix4, Matrix6, Vector3, Vector6};

use crate::error::{GeometryError, Result};
use crate::so3::{
    self, hat3, manifold_error, orthonormalize, rodrigues_coefficients, so3_exp, so3_log, RotationMatrix,
    RotationVector, ORTHOGONALITY_TOL, SMALL_ANGLE,
};

/// Rotation blocks read from files may drift up to this far from SO(3) and
/// still be repaired by [`from_matrix4`].
pub const REPAIR_THRESHOLD: f64 = 1e-4;

/// Tolerance on the `(0, 0, 0, 1)` bottom row of a homogeneous matrix.
pub const HOMOGENEOUS_ROW_TOL: f64 = 1e-9;

/// Rigid transform `x ↦ R x + t`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Transform {
    pub rotation: RotationMatrix,
    pub translation: Vector3<f64>,
}

impl Transform {
    pub fn new(rotation: RotationMatrix, translation: Vector3<f64>) -> Self {
        Self { rotation, translation }
    }

    pub fn identity() -> Self {
        Self::default()
    }

    pub fn from_translation(translation: Vector3<f64>) -> Self {
        Self {
            rotation: RotationMatrix::identity(),
            translation,
        }
    }

    pub fn from_rotation(rotation: RotationMatrix) -> Self {
        Self {
            rotation,
            translation: Vector3::zeros(),
        }
    }

    pub fn inverse(&self) -> Self {
        inverse(self)
    }

    pub fn to_matrix4(&self) -> Matrix4<f64> {
        to_matrix4(self)
    }
}

impl Mul for Transform {
    type Output = Transform;

    fn mul(self, rhs: Transform) -> Transform {
        compose(&self, &rhs)
    }
}

impl Mul<&Transform> for &Transform {
    type Output = Transform;

    fn mul(self, rhs: &Transform) -> Transform {
        compose(self, rhs)
    }
}

/// Element of se(3): linear part `v`, angular part `w`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Twist {
    pub v: Vector3<f64>,
    pub w: Vector3<f64>,
}

impl Twist {
    pub fn new(v: Vector3<f64>, w: Vector3<f64>) -> Self {
        Self { v, w }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `(v, w)` stacked into one 6-vector.
    pub fn to_vector(&self) -> Vector6<f64> {
        Vector6::new(self.v.x, self.v.y, self.v.z, self.w.x, self.w.y, self.w.z)
    }

    pub fn from_vector(x: &Vector6<f64>) -> Self {
        Self {
            v: x.fixed_rows::<3>(0).into_owned(),
            w: x.fixed_rows::<3>(3).into_owned(),
        }
    }
}

/// Force `f` and moment `tau`, in that order.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Wrench {
    pub f: Vector3<f64>,
    pub tau: Vector3<f64>,
}

impl Wrench {
    pub fn new(f: Vector3<f64>, tau: Vector3<f64>) -> Self {
        Self { f, tau }
    }

    /// Instantaneous power delivered to a body moving with `twist`.
    pub fn power(&self, twist: &Twist) -> f64 {
        self.f.dot(&twist.v) + self.tau.dot(&twist.w)
    }
}

/// 6×6 adjoint of a transform, acting on `(v, w)`-ordered twists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdjointMatrix(pub Matrix6<f64>);

impl AdjointMatrix {
    pub fn matrix(&self) -> &Matrix6<f64> {
        &self.0
    }

    pub fn apply(&self, twist: &Twist) -> Twist {
        Twist::from_vector(&(self.0 * twist.to_vector()))
    }

    /// Reads back the `(R, t)` the matrix was built from, checking the block
    /// layout `[[R, [t]× R], [0, R]]`.
    pub fn to_transform(&self) -> Result<Transform> {
        let a = &self.0;
        let r: Matrix3<f64> = a.fixed_view::<3, 3>(0, 0).into_owned();
        let rotation = RotationMatrix::new(r)?;
        let lower_right = a.fixed_view::<3, 3>(3, 3).into_owned();
        let lower_left = a.fixed_view::<3, 3>(3, 0).into_owned();
        let skew_t = a.fixed_view::<3, 3>(0, 3).into_owned() * r.transpose();
        let t = so3::vee3(&skew_t)?;
        let mismatch = (lower_right - r).norm() + lower_left.norm();
        if mismatch > ORTHOGONALITY_TOL {
            return Err(GeometryError::DegenerateMatrix {
                reason: format!("adjoint block layout violated by {mismatch:.3e}"),
            });
        }
        Ok(Transform::new(rotation, t))
    }
}

/// `A · B`, applying `B` first.
pub fn compose(a: &Transform, b: &Transform) -> Transform {
    Transform {
        rotation: a.rotation.compose(&b.rotation),
        translation: a.rotation.matrix() * b.translation + a.translation,
    }
}

pub fn inverse(t: &Transform) -> Transform {
    let rt = t.rotation.transpose();
    let translation = -(rt.matrix() * t.translation);
    Transform {
        rotation: rt,
        translation,
    }
}

pub fn transform_point(t: &Transform, p: &Vector3<f64>) -> Vector3<f64> {
    t.rotation.matrix() * p + t.translation
}

pub fn transform_direction(t: &Transform, v: &Vector3<f64>) -> Vector3<f64> {
    t.rotation.matrix() * v
}

/// `(θ - sin θ) / θ³`, the coefficient of `[w]×²` in the left Jacobian.
fn third_coefficient(theta: f64) -> f64 {
    if theta < SMALL_ANGLE {
        1.0 / 6.0 - theta * theta / 120.0
    } else {
        (theta - theta.sin()) / (theta * theta * theta)
    }
}

/// Left Jacobian of SO(3), mapping `v` to the translation of `exp(v, w)`.
fn left_jacobian(w: &Vector3<f64>) -> Matrix3<f64> {
    let theta = w.norm();
    let k = hat3(w);
    let (_, b) = rodrigues_coefficients(theta);
    Matrix3::identity() + k * b + k * k * third_coefficient(theta)
}

fn left_jacobian_inverse(w: &Vector3<f64>) -> Matrix3<f64> {
    let theta = w.norm();
    let k = hat3(w);
    let c = if theta < SMALL_ANGLE {
        1.0 / 12.0 + theta * theta / 720.0
    } else {
        // (1 + cos θ) / sin θ = cot(θ/2), which stays finite up to θ = π.
        let half = 0.5 * theta;
        1.0 / (theta * theta) - half.cos() / (half.sin() * 2.0 * theta)
    };
    Matrix3::identity() - k * 0.5 + k * k * c
}

pub fn se3_exp(xi: &Twist) -> Transform {
    Transform {
        rotation: so3_exp(&RotationVector(xi.w)),
        translation: left_jacobian(&xi.w) * xi.v,
    }
}

pub fn se3_log(t: &Transform) -> Twist {
    let w = so3_log(&t.rotation).0;
    Twist {
        v: left_jacobian_inverse(&w) * t.translation,
        w,
    }
}

pub fn adjoint(t: &Transform) -> AdjointMatrix {
    let r = t.rotation.matrix();
    let mut a = Matrix6::zeros();
    a.fixed_view_mut::<3, 3>(0, 0).copy_from(r);
    a.fixed_view_mut::<3, 3>(3, 3).copy_from(r);
    a.fixed_view_mut::<3, 3>(0, 3).copy_from(&(hat3(&t.translation) * r));
    AdjointMatrix(a)
}

pub fn adjoint_apply_twist(t: &Transform, xi: &Twist) -> Twist {
    let rw = t.rotation.matrix() * xi.w;
    Twist {
        v: t.rotation.matrix() * xi.v + t.translation.cross(&rw),
        w: rw,
    }
}

pub fn transform_wrench(t: &Transform, h: &Wrench) -> Wrench {
    let rf = t.rotation.matrix() * h.f;
    Wrench {
        f: rf,
        tau: t.rotation.matrix() * h.tau + t.translation.cross(&rf),
    }
}

/// Row-major `[[R, t], [0 0 0 1]]`.
pub fn to_matrix4(t: &Transform) -> Matrix4<f64> {
    let mut m = Matrix4::identity();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(t.rotation.matrix());
    m.fixed_view_mut::<3, 1>(0, 3).copy_from(&t.translation);
    m
}

/// Reads a homogeneous matrix. Rotation blocks within [`REPAIR_THRESHOLD`]
/// of SO(3) are projected back onto it; anything further is rejected.
pub fn from_matrix4(m: &Matrix4<f64>) -> Result<Transform> {
    let row = [m[(3, 0)], m[(3, 1)], m[(3, 2)], m[(3, 3)]];
    let row_error = row[0].abs() + row[1].abs() + row[2].abs() + (row[3] - 1.0).abs();
    if row_error.is_nan() || row_error > HOMOGENEOUS_ROW_TOL {
        return Err(GeometryError::InvalidHomogeneousRow { row });
    }
    let block: Matrix3<f64> = m.fixed_view::<3, 3>(0, 0).into_owned();
    let translation: Vector3<f64> = m.fixed_view::<3, 1>(0, 3).into_owned();
    if !translation.iter().all(|v| v.is_finite()) {
        return Err(GeometryError::DegenerateMatrix {
            reason: "non-finite translation".into(),
        });
    }
    let rotation = match RotationMatrix::new(block) {
        Ok(r) => r,
        Err(err) => {
            let (orthogonality, det) = manifold_error(&block);
            if orthogonality < REPAIR_THRESHOLD && (det - 1.0).abs() < REPAIR_THRESHOLD {
                orthonormalize(&block)?
            } else {
                return Err(err);
            }
        }
    };
    Ok(Transform { rotation, translation })
}
