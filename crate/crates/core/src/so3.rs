//! Rotations in 3D: matrix, quaternion, rotation-vector and Euler charts of
//! SO(3), the exp/log pair, and projection back onto the manifold.
//!
//! Quaternions are stored scalar-first `(w, x, y, z)` and follow the Hamilton
//! product convention. Every [`RotationMatrix`] is validated on construction,
//! so functions taking one never need to re-check orthogonality.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use nalgebra::{Matrix3, Vector3};

use crate::error::{GeometryError, Result};

/// Maximum allowed `|R^T R - I|_F` and `|det R - 1|` for a valid rotation.
pub const ORTHOGONALITY_TOL: f64 = 1e-9;

/// Below this angle the exp/log coefficients switch to their Taylor series.
pub const SMALL_ANGLE: f64 = 1e-8;

/// `so3_log` recovers the axis from the symmetric part once `θ > π - NEAR_PI`.
pub const NEAR_PI: f64 = 1e-4;

/// Largest tolerated deviation of a quaternion norm from 1 in [`UnitQuaternion::new`].
pub const QUATERNION_NORM_TOL: f64 = 1e-6;

/// Pitch closer than this to ±π/2 is reported as gimbal lock.
pub const GIMBAL_LOCK_TOL: f64 = 1e-7;

/// Largest Frobenius distance from SO(3) that [`orthonormalize`] accepts.
pub const MAX_REPAIR_DISTANCE: f64 = 0.5;

/// Smallest singular value [`orthonormalize`] accepts.
pub const MIN_SINGULAR_VALUE: f64 = 1e-9;

/// Deviation of a 3×3 matrix from SO(3): `(|M^T M - I|_F, det M)`.
pub fn manifold_error(m: &Matrix3<f64>) -> (f64, f64) {
    let orth = (m.transpose() * m - Matrix3::identity()).norm();
    (orth, m.determinant())
}

/// An element of SO(3) stored as a direction-cosine matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix(Matrix3<f64>);

impl RotationMatrix {
    /// Validates `m` against [`ORTHOGONALITY_TOL`].
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        let (orthogonality, det) = manifold_error(&m);
        let finite = m.iter().all(|v| v.is_finite());
        if !finite || orthogonality >= ORTHOGONALITY_TOL || (det - 1.0).abs() >= ORTHOGONALITY_TOL {
            return Err(GeometryError::NotARotation { orthogonality, det });
        }
        Ok(Self(m))
    }

    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Builds from nine row-major entries.
    pub fn from_row_slice(rows: &[f64; 9]) -> Result<Self> {
        Self::new(Matrix3::from_row_slice(rows))
    }

    pub(crate) fn from_matrix_unchecked(m: Matrix3<f64>) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn into_inner(self) -> Matrix3<f64> {
        self.0
    }

    /// The inverse rotation.
    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn about_x(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self(Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c))
    }

    pub fn about_y(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self(Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c))
    }

    pub fn about_z(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self(Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0))
    }

    /// Product `self · rhs`, re-projected onto SO(3) only if rounding pushed
    /// it past [`ORTHOGONALITY_TOL`].
    pub fn compose(&self, rhs: &RotationMatrix) -> RotationMatrix {
        let product = self.0 * rhs.0;
        let (orth, det) = manifold_error(&product);
        if orth > ORTHOGONALITY_TOL || (det - 1.0).abs() > ORTHOGONALITY_TOL {
            Self(project_to_so3(&product))
        } else {
            Self(product)
        }
    }
}

impl Default for RotationMatrix {
    fn default() -> Self {
        Self::identity()
    }
}

impl Mul for RotationMatrix {
    type Output = RotationMatrix;

    fn mul(self, rhs: RotationMatrix) -> RotationMatrix {
        self.compose(&rhs)
    }
}

impl Mul<Vector3<f64>> for RotationMatrix {
    type Output = Vector3<f64>;

    fn mul(self, rhs: Vector3<f64>) -> Vector3<f64> {
        self.0 * rhs
    }
}

/// Unit quaternion `(w, x, y, z)`, scalar first, always in canonical sign:
/// `w >= 0`, and when `w == 0` the first nonzero vector component is positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitQuaternion {
    w: f64,
    x: f64,
    y: f64,
    z: f64,
}

impl UnitQuaternion {
    /// Renormalizes and canonicalizes; rejects norms further than
    /// [`QUATERNION_NORM_TOL`] from 1.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (w * w + x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > QUATERNION_NORM_TOL {
            return Err(GeometryError::NotUnitQuaternion { norm });
        }
        Ok(Self::normalized(w, x, y, z))
    }

    /// Builds from a scalar-first array.
    pub fn from_array(q: [f64; 4]) -> Result<Self> {
        Self::new(q[0], q[1], q[2], q[3])
    }

    pub fn identity() -> Self {
        Self {
            w: 1.0,
            x: 0.0,
            y: 0.0,
            z: 0.0,
        }
    }

    fn normalized(w: f64, x: f64, y: f64, z: f64) -> Self {
        let norm = (w * w + x * x + y * y + z * z).sqrt();
        let (w, x, y, z) = (w / norm, x / norm, y / norm, z / norm);
        let flip = if w != 0.0 {
            w < 0.0
        } else {
            [x, y, z].into_iter().find(|c| *c != 0.0).is_some_and(|c| c < 0.0)
        };
        let s = if flip { -1.0 } else { 1.0 };
        // `+ 0.0` folds negative zeros so canonical values compare and print identically.
        Self {
            w: s * w + 0.0,
            x: s * x + 0.0,
            y: s * y + 0.0,
            z: s * z + 0.0,
        }
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// Scalar-first components.
    pub fn to_array(&self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn vector_part(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }
}

impl Default for UnitQuaternion {
    fn default() -> Self {
        Self::identity()
    }
}

/// Axis-angle vector: direction is the axis, norm is the angle in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationVector(pub Vector3<f64>);

impl RotationVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self(Vector3::new(x, y, z))
    }

    pub fn zero() -> Self {
        Self(Vector3::zeros())
    }

    pub fn vector(&self) -> &Vector3<f64> {
        &self.0
    }

    pub fn angle(&self) -> f64 {
        self.0.norm()
    }
}

impl From<Vector3<f64>> for RotationVector {
    fn from(v: Vector3<f64>) -> Self {
        Self(v)
    }
}

/// Supported Euler conventions.
///
/// Both describe `R = Rz(c) · Ry(b) · Rx(a)` for stored angles `(a, b, c)`:
/// intrinsic yaw-pitch-roll about z, then the new y, then the new x, is the
/// same matrix as extrinsic rotations about the fixed x, y, then z axes.
/// Angles are always stored in `(about x, about y, about z)` order, i.e.
/// `(roll, pitch, yaw)` for the ZYX intrinsic reading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EulerConvention {
    ZyxIntrinsic,
    XyzExtrinsic,
}

impl fmt::Display for EulerConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EulerConvention::ZyxIntrinsic => f.write_str("zyx-intrinsic"),
            EulerConvention::XyzExtrinsic => f.write_str("xyz-extrinsic"),
        }
    }
}

impl FromStr for EulerConvention {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "zyx-intrinsic" | "zyx" | "rpy" => Ok(EulerConvention::ZyxIntrinsic),
            "xyz-extrinsic" => Ok(EulerConvention::XyzExtrinsic),
            _ => Err(GeometryError::UnsupportedConvention(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerAngles {
    /// Radians, ordered (about x, about y, about z).
    pub angles: Vector3<f64>,
    pub convention: EulerConvention,
}

impl EulerAngles {
    pub fn zyx_intrinsic(roll: f64, pitch: f64, yaw: f64) -> Self {
        Self {
            angles: Vector3::new(roll, pitch, yaw),
            convention: EulerConvention::ZyxIntrinsic,
        }
    }

    pub fn xyz_extrinsic(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self {
            angles: Vector3::new(alpha, beta, gamma),
            convention: EulerConvention::XyzExtrinsic,
        }
    }

    pub fn roll(&self) -> f64 {
        self.angles.x
    }

    pub fn pitch(&self) -> f64 {
        self.angles.y
    }

    pub fn yaw(&self) -> f64 {
        self.angles.z
    }
}

/// Result of [`matrix_to_euler`]. When `gimbal_lock` is set the roll angle
/// has been fixed to zero and yaw carries the whole free rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerDecomposition {
    pub angles: EulerAngles,
    pub gimbal_lock: bool,
}

/// Cross-product matrix: `hat3(v) * u == v × u`.
pub fn hat3(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Inverse of [`hat3`].
pub fn vee3(s: &Matrix3<f64>) -> Result<Vector3<f64>> {
    let asymmetry = (s + s.transpose()).norm();
    if asymmetry.is_nan() || asymmetry >= 1e-9 {
        return Err(GeometryError::NotSkewSymmetric { asymmetry });
    }
    Ok(Vector3::new(s[(2, 1)], s[(0, 2)], s[(1, 0)]))
}

/// `sin θ / θ` and `(1 - cos θ) / θ²`.
pub(crate) fn rodrigues_coefficients(theta: f64) -> (f64, f64) {
    if theta < SMALL_ANGLE {
        let t2 = theta * theta;
        (1.0 - t2 / 6.0, 0.5 - t2 / 24.0)
    } else {
        let half = (0.5 * theta).sin();
        (theta.sin() / theta, 2.0 * half * half / (theta * theta))
    }
}

/// Rodrigues' formula.
pub fn so3_exp(r: &RotationVector) -> RotationMatrix {
    let theta = r.0.norm();
    let k = hat3(&r.0);
    let (a, b) = rodrigues_coefficients(theta);
    RotationMatrix(Matrix3::identity() + k * a + k * k * b)
}

/// Angle of `m` and the vector `vee(m - m^T) / 2 = sin θ · axis`.
fn angle_and_sine_axis(m: &Matrix3<f64>) -> (f64, Vector3<f64>) {
    let cos = 0.5 * (m.trace() - 1.0);
    let sine_axis = 0.5 * Vector3::new(m[(2, 1)] - m[(1, 2)], m[(0, 2)] - m[(2, 0)], m[(1, 0)] - m[(0, 1)]);
    // atan2 keeps full precision at both ends where arccos does not.
    let theta = sine_axis.norm().atan2(cos.clamp(-1.0, 1.0));
    (theta, sine_axis)
}

/// Inverse of [`so3_exp`], returning an angle in `[0, π]`.
pub fn so3_log(rotation: &RotationMatrix) -> RotationVector {
    let m = &rotation.0;
    let (theta, sine_axis) = angle_and_sine_axis(m);

    if theta < SMALL_ANGLE {
        return RotationVector(sine_axis * (1.0 + theta * theta / 6.0));
    }
    if theta <= std::f64::consts::PI - NEAR_PI {
        return RotationVector(sine_axis * (theta / theta.sin()));
    }

    // Near a half turn: sym(R) = cos θ · I + (1 - cos θ) · n nᵀ.
    let cos = theta.cos();
    let outer = (0.5 * (m + m.transpose()) - Matrix3::identity() * cos) / (1.0 - cos);
    let k = (0..3)
        .max_by(|&i, &j| outer[(i, i)].total_cmp(&outer[(j, j)]))
        .unwrap_or(0);
    let mut axis: Vector3<f64> = outer.column(k).into_owned() / outer[(k, k)].max(0.0).sqrt();
    axis.normalize_mut();

    let alignment = axis.dot(&sine_axis);
    let flip = if alignment != 0.0 {
        alignment < 0.0
    } else {
        axis.iter().find(|c| c.abs() > 1e-12).is_some_and(|c| *c < 0.0)
    };
    if flip {
        axis = -axis;
    }
    RotationVector(axis * theta)
}

/// Hamilton-convention direction-cosine matrix.
pub fn quat_to_matrix(q: &UnitQuaternion) -> RotationMatrix {
    let UnitQuaternion { w, x, y, z } = *q;
    RotationMatrix(Matrix3::new(
        1.0 - 2.0 * (y * y + z * z),
        2.0 * (x * y - w * z),
        2.0 * (x * z + w * y),
        2.0 * (x * y + w * z),
        1.0 - 2.0 * (x * x + z * z),
        2.0 * (y * z - w * x),
        2.0 * (x * z - w * y),
        2.0 * (y * z + w * x),
        1.0 - 2.0 * (x * x + y * y),
    ))
}

/// Shepperd's method: pivot on the largest of the trace and the diagonal.
pub fn matrix_to_quat(rotation: &RotationMatrix) -> UnitQuaternion {
    let m = &rotation.0;
    let trace = m.trace();
    let candidates = [trace, m[(0, 0)], m[(1, 1)], m[(2, 2)]];
    let pivot = (0..4)
        .max_by(|&i, &j| candidates[i].total_cmp(&candidates[j]))
        .unwrap_or(0);

    let (w, x, y, z) = match pivot {
        0 => {
            let s = 2.0 * (1.0 + trace).sqrt();
            (
                0.25 * s,
                (m[(2, 1)] - m[(1, 2)]) / s,
                (m[(0, 2)] - m[(2, 0)]) / s,
                (m[(1, 0)] - m[(0, 1)]) / s,
            )
        }
        1 => {
            let s = 2.0 * (1.0 + m[(0, 0)] - m[(1, 1)] - m[(2, 2)]).sqrt();
            (
                (m[(2, 1)] - m[(1, 2)]) / s,
                0.25 * s,
                (m[(0, 1)] + m[(1, 0)]) / s,
                (m[(0, 2)] + m[(2, 0)]) / s,
            )
        }
        2 => {
            let s = 2.0 * (1.0 - m[(0, 0)] + m[(1, 1)] - m[(2, 2)]).sqrt();
            (
                (m[(0, 2)] - m[(2, 0)]) / s,
                (m[(0, 1)] + m[(1, 0)]) / s,
                0.25 * s,
                (m[(1, 2)] + m[(2, 1)]) / s,
            )
        }
        _ => {
            let s = 2.0 * (1.0 - m[(0, 0)] - m[(1, 1)] + m[(2, 2)]).sqrt();
            (
                (m[(1, 0)] - m[(0, 1)]) / s,
                (m[(0, 2)] + m[(2, 0)]) / s,
                (m[(1, 2)] + m[(2, 1)]) / s,
                0.25 * s,
            )
        }
    };
    UnitQuaternion::normalized(w, x, y, z)
}

/// Hamilton product `a ∘ b`, so that the matrix of the result is `A · B`.
pub fn quat_compose(a: &UnitQuaternion, b: &UnitQuaternion) -> UnitQuaternion {
    let w = a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z;
    let x = a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y;
    let y = a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x;
    let z = a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w;
    UnitQuaternion::normalized(w, x, y, z)
}

pub fn quat_inverse(q: &UnitQuaternion) -> UnitQuaternion {
    UnitQuaternion::normalized(q.w, -q.x, -q.y, -q.z)
}

pub fn euler_to_matrix(e: &EulerAngles) -> RotationMatrix {
    match e.convention {
        EulerConvention::ZyxIntrinsic | EulerConvention::XyzExtrinsic => {
            let (sr, cr) = e.angles.x.sin_cos();
            let (sp, cp) = e.angles.y.sin_cos();
            let (sy, cy) = e.angles.z.sin_cos();
            RotationMatrix(Matrix3::new(
                cy * cp,
                cy * sp * sr - sy * cr,
                cy * sp * cr + sy * sr,
                sy * cp,
                sy * sp * sr + cy * cr,
                sy * sp * cr - cy * sr,
                -sp,
                cp * sr,
                cp * cr,
            ))
        }
    }
}

/// Decomposes `R = Rz(c) · Ry(b) · Rx(a)`. The middle angle lies in
/// `[-π/2, π/2]`; the outer two in `(-π, π]`.
pub fn matrix_to_euler(rotation: &RotationMatrix, convention: EulerConvention) -> EulerDecomposition {
    let m = &rotation.0;
    let cos_pitch = m[(0, 0)].hypot(m[(1, 0)]);
    let pitch = (-m[(2, 0)]).atan2(cos_pitch);
    let gimbal_lock = std::f64::consts::FRAC_PI_2 - pitch.abs() < GIMBAL_LOCK_TOL;

    let (roll, yaw) = if gimbal_lock {
        (0.0, (-m[(0, 1)]).atan2(m[(1, 1)]))
    } else {
        (m[(2, 1)].atan2(m[(2, 2)]), m[(1, 0)].atan2(m[(0, 0)]))
    };
    EulerDecomposition {
        angles: EulerAngles {
            angles: Vector3::new(roll, pitch, yaw),
            convention,
        },
        gimbal_lock,
    }
}

pub fn rotate(rotation: &RotationMatrix, v: &Vector3<f64>) -> Vector3<f64> {
    rotation.0 * v
}

/// SVD projection `U · diag(1, 1, d) · V^T` with the sign correction on the
/// smallest singular direction. No input guards.
pub(crate) fn project_to_so3(m: &Matrix3<f64>) -> Matrix3<f64> {
    let (u, sigma, v_t) = svd3(m);
    let d = (u * v_t).determinant().signum();
    let mut correction = Vector3::new(1.0, 1.0, 1.0);
    correction[sigma.imin()] = d;
    u * Matrix3::from_diagonal(&correction) * v_t
}

pub(crate) fn svd3(m: &Matrix3<f64>) -> (Matrix3<f64>, Vector3<f64>, Matrix3<f64>) {
    let svd = m.svd(true, true);
    // Both factors were requested, so they are present.
    let u = svd.u.expect("svd computed with u");
    let v_t = svd.v_t.expect("svd computed with v_t");
    (u, svd.singular_values, v_t)
}

/// Nearest rotation to `m` in Frobenius norm.
pub fn orthonormalize(m: &Matrix3<f64>) -> Result<RotationMatrix> {
    if !m.iter().all(|v| v.is_finite()) {
        return Err(GeometryError::DegenerateMatrix {
            reason: "non-finite entries".into(),
        });
    }
    let (_, sigma, _) = svd3(m);
    let smallest = sigma.min();
    if smallest < MIN_SINGULAR_VALUE {
        return Err(GeometryError::DegenerateMatrix {
            reason: format!("singular value {smallest:.3e} below {MIN_SINGULAR_VALUE:.0e}"),
        });
    }
    let projected = project_to_so3(m);
    let distance = (m - projected).norm();
    if distance > MAX_REPAIR_DISTANCE {
        return Err(GeometryError::DegenerateMatrix {
            reason: format!("Frobenius distance {distance:.3e} to SO(3) exceeds {MAX_REPAIR_DISTANCE}"),
        });
    }
    Ok(RotationMatrix(projected))
}

/// Angle of the relative rotation `A^T B`, in `[0, π]`.
pub fn geodesic_distance(a: &RotationMatrix, b: &RotationMatrix) -> f64 {
    angle_and_sine_axis(&(a.0.transpose() * b.0)).0
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, PI};

    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

    // Oracle: truncated power series of the matrix exponential.
    fn series_exp(a: &Matrix3<f64>, terms: usize) -> Matrix3<f64> {
        let mut sum = Matrix3::identity();
        let mut term = Matrix3::identity();
        for k in 1..=terms {
            term = term * a / k as f64;
            sum += term;
        }
        sum
    }

    fn random_vector(rng: &mut impl Rng, scale: f64) -> Vector3<f64> {
        Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ) * scale
    }

    fn random_rotation_vector(rng: &mut impl Rng, max_angle: f64) -> Vector3<f64> {
        let axis = loop {
            let v = random_vector(rng, 1.0);
            let n = v.norm();
            if n > 1e-3 && n <= 1.0 {
                break v / n;
            }
        };
        axis * rng.random_range(0.0..max_angle)
    }

    fn random_rotation(rng: &mut impl Rng) -> RotationMatrix {
        so3_exp(&RotationVector(random_rotation_vector(rng, PI)))
    }

    fn assert_valid(r: &RotationMatrix) {
        let (orth, det) = manifold_error(r.matrix());
        assert!(orth < ORTHOGONALITY_TOL, "orthogonality {orth}");
        assert!((det - 1.0).abs() < ORTHOGONALITY_TOL, "det {det}");
    }

    #[test]
    fn hat3_examples() {
        assert_eq!(hat3(&Vector3::zeros()), Matrix3::zeros());
        assert_eq!(
            hat3(&Vector3::new(1.0, 2.0, 3.0)),
            Matrix3::new(0.0, -3.0, 2.0, 3.0, 0.0, -1.0, -2.0, 1.0, 0.0)
        );
    }

    #[test]
    fn hat3_matches_componentwise_cross_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let v = random_vector(&mut rng, 5.0);
            let u = random_vector(&mut rng, 5.0);
            let cross = Vector3::new(v.y * u.z - v.z * u.y, v.z * u.x - v.x * u.z, v.x * u.y - v.y * u.x);
            let s = hat3(&v);
            assert_abs_diff_eq!(s * u, cross, epsilon = 1e-12);
            assert_eq!(s, -s.transpose());
        }
    }

    #[test]
    fn vee3_examples_and_errors() {
        assert_eq!(vee3(&Matrix3::zeros()).unwrap(), Vector3::zeros());
        let s = Matrix3::new(0.0, -3.0, 2.0, 3.0, 0.0, -1.0, -2.0, 1.0, 0.0);
        assert_eq!(vee3(&s).unwrap(), Vector3::new(1.0, 2.0, 3.0));
        let err = vee3(&Matrix3::identity()).unwrap_err();
        assert!(matches!(err, GeometryError::NotSkewSymmetric { .. }));
    }

    #[test]
    fn so3_exp_examples() {
        assert_eq!(*so3_exp(&RotationVector::zero()).matrix(), Matrix3::identity());
        let quarter = so3_exp(&RotationVector::new(FRAC_PI_2, 0.0, 0.0));
        assert_abs_diff_eq!(
            *quarter.matrix(),
            Matrix3::new(1.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0),
            epsilon = 1e-15
        );
        let r = Vector3::new(0.1, 0.2, 0.3);
        assert_abs_diff_eq!(
            *so3_exp(&RotationVector(r)).matrix(),
            series_exp(&hat3(&r), 30),
            epsilon = 1e-12
        );
    }

    #[test]
    fn so3_exp_matches_series_up_to_pi_and_near_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let r = random_rotation_vector(&mut rng, PI);
            let oracle = series_exp(&hat3(&r), 30);
            assert_abs_diff_eq!(*so3_exp(&RotationVector(r)).matrix(), oracle, epsilon = 1e-12);
        }
        for scale in [1e-12, 1e-9, 3e-8, 1e-6] {
            let r = Vector3::new(0.3, -0.5, 0.8).normalize() * scale;
            let oracle = series_exp(&hat3(&r), 30);
            assert_abs_diff_eq!(*so3_exp(&RotationVector(r)).matrix(), oracle, epsilon = 1e-15);
        }
    }

    #[test]
    fn so3_log_examples() {
        assert_eq!(so3_log(&RotationMatrix::identity()).0, Vector3::zeros());
        let half = RotationMatrix::new(Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, -1.0))).unwrap();
        assert_abs_diff_eq!(so3_log(&half).0, Vector3::new(PI, 0.0, 0.0), epsilon = 1e-15);
        let half_y = RotationMatrix::new(Matrix3::from_diagonal(&Vector3::new(-1.0, 1.0, -1.0))).unwrap();
        assert_abs_diff_eq!(so3_log(&half_y).0, Vector3::new(0.0, PI, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn so3_log_inverts_exp() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let r = random_rotation_vector(&mut rng, PI);
            let back = so3_log(&so3_exp(&RotationVector(r))).0;
            assert_abs_diff_eq!(back, r, epsilon = 1e-9);
        }
    }

    #[test]
    fn so3_log_near_half_turn_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for offset in [0.0, 1e-12, 1e-8, 1e-5, 5e-5, 1e-4, 2e-4] {
            for _ in 0..50 {
                let axis = random_rotation_vector(&mut rng, 1.0).normalize();
                let r = so3_exp(&RotationVector(axis * (PI - offset)));
                let log = so3_log(&r);
                assert!(log.angle() <= PI + 1e-9);
                assert_abs_diff_eq!(*so3_exp(&log).matrix(), *r.matrix(), epsilon = 1e-9);
                if offset > 1e-8 {
                    assert_abs_diff_eq!(log.0, axis * (PI - offset), epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn small_angle_log() {
        for scale in [0.0, 1e-14, 1e-10, 5e-9, 2e-8, 1e-6] {
            let r = Vector3::new(-0.2, 0.9, 0.4).normalize() * scale;
            let back = so3_log(&so3_exp(&RotationVector(r))).0;
            assert_abs_diff_eq!(back, r, epsilon = 1e-15);
        }
    }

    #[test]
    fn quaternion_examples() {
        assert_eq!(
            *quat_to_matrix(&UnitQuaternion::identity()).matrix(),
            Matrix3::identity()
        );
        let qz = UnitQuaternion::new(SQRT_HALF, 0.0, 0.0, SQRT_HALF).unwrap();
        let rz = Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0);
        assert_abs_diff_eq!(*quat_to_matrix(&qz).matrix(), rz, epsilon = 1e-15);

        assert_eq!(
            matrix_to_quat(&RotationMatrix::identity()).to_array(),
            [1.0, 0.0, 0.0, 0.0]
        );
        let q = matrix_to_quat(&RotationMatrix::new(rz).unwrap());
        assert_abs_diff_eq!(q.w(), SQRT_HALF, epsilon = 1e-15);
        assert_abs_diff_eq!(q.z(), SQRT_HALF, epsilon = 1e-15);
        assert_eq!((q.x(), q.y()), (0.0, 0.0));

        assert_eq!(quat_inverse(&UnitQuaternion::identity()), UnitQuaternion::identity());
        let inv = quat_inverse(&qz);
        assert_eq!(inv.to_array(), [SQRT_HALF, 0.0, 0.0, -SQRT_HALF]);
    }

    #[test]
    fn quaternion_rejects_non_unit() {
        assert!(matches!(
            UnitQuaternion::new(1.0, 0.1, 0.0, 0.0),
            Err(GeometryError::NotUnitQuaternion { .. })
        ));
        assert!(UnitQuaternion::new(1.0 + 5e-7, 0.0, 0.0, 0.0).is_ok());
        assert!(UnitQuaternion::new(f64::NAN, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn quaternion_canonical_sign() {
        let q = UnitQuaternion::new(-0.5, 0.5, -0.5, 0.5).unwrap();
        assert_eq!(q.to_array(), [0.5, -0.5, 0.5, -0.5]);
        let q = UnitQuaternion::new(0.0, 0.0, -1.0, 0.0).unwrap();
        assert_eq!(q.to_array(), [0.0, 0.0, 1.0, 0.0]);
        let half_x = RotationMatrix::new(Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, -1.0))).unwrap();
        assert_eq!(matrix_to_quat(&half_x).to_array(), [0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn quat_to_matrix_matches_axis_angle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let raw = nalgebra::Vector4::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            )
            .normalize();
            let q = UnitQuaternion::new(raw[0], raw[1], raw[2], raw[3]).unwrap();
            let v = q.vector_part();
            let angle = 2.0 * v.norm().atan2(q.w());
            let oracle = so3_exp(&RotationVector(v.normalize() * angle));
            assert_abs_diff_eq!(*quat_to_matrix(&q).matrix(), *oracle.matrix(), epsilon = 1e-12);
        }
    }

    #[test]
    fn matrix_quaternion_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..1000 {
            let r = random_rotation(&mut rng);
            let q = matrix_to_quat(&r);
            assert!(q.w() >= 0.0);
            assert_abs_diff_eq!(*quat_to_matrix(&q).matrix(), *r.matrix(), epsilon = 1e-12);
        }
    }

    #[test]
    fn compose_and_inverse_quaternions() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let a = matrix_to_quat(&random_rotation(&mut rng));
            let b = matrix_to_quat(&random_rotation(&mut rng));
            let ab = quat_compose(&a, &b);
            let expected = quat_to_matrix(&a).matrix() * quat_to_matrix(&b).matrix();
            assert_abs_diff_eq!(*quat_to_matrix(&ab).matrix(), expected, epsilon = 1e-12);

            let same = quat_compose(&UnitQuaternion::identity(), &a);
            assert_abs_diff_eq!(
                nalgebra::Vector4::from(same.to_array()),
                nalgebra::Vector4::from(a.to_array()),
                epsilon = 1e-15
            );
            let id = quat_compose(&a, &quat_inverse(&a));
            assert_abs_diff_eq!(id.w(), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(id.vector_part(), Vector3::zeros(), epsilon = 1e-12);
            assert_abs_diff_eq!(
                *quat_to_matrix(&quat_inverse(&a)).matrix(),
                quat_to_matrix(&a).matrix().transpose(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn euler_examples() {
        for convention in [EulerConvention::ZyxIntrinsic, EulerConvention::XyzExtrinsic] {
            let e = EulerAngles {
                angles: Vector3::zeros(),
                convention,
            };
            assert_eq!(*euler_to_matrix(&e).matrix(), Matrix3::identity());
            let d = matrix_to_euler(&RotationMatrix::identity(), convention);
            assert_eq!(d.angles.angles, Vector3::zeros());
            assert!(!d.gimbal_lock);
        }
        let yaw = euler_to_matrix(&EulerAngles::zyx_intrinsic(0.0, 0.0, FRAC_PI_2));
        assert_abs_diff_eq!(
            *yaw.matrix(),
            Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0),
            epsilon = 1e-15
        );
    }

    #[test]
    fn euler_matches_elementary_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..500 {
            let (a, b, c) = (
                rng.random_range(-PI..PI),
                rng.random_range(-PI..PI),
                rng.random_range(-PI..PI),
            );
            // Intrinsic z-y'-x'': each rotation is applied about the already-rotated axes.
            let intrinsic = RotationMatrix::about_z(c).matrix()
                * RotationMatrix::about_y(b).matrix()
                * RotationMatrix::about_x(a).matrix();
            // Extrinsic: x first, then the fixed y, then the fixed z, each premultiplied.
            let mut extrinsic = *RotationMatrix::about_x(a).matrix();
            extrinsic = RotationMatrix::about_y(b).matrix() * extrinsic;
            extrinsic = RotationMatrix::about_z(c).matrix() * extrinsic;

            let zyx = euler_to_matrix(&EulerAngles::zyx_intrinsic(a, b, c));
            let xyz = euler_to_matrix(&EulerAngles::xyz_extrinsic(a, b, c));
            assert_abs_diff_eq!(*zyx.matrix(), intrinsic, epsilon = 1e-12);
            assert_abs_diff_eq!(*xyz.matrix(), extrinsic, epsilon = 1e-12);
        }
    }

    #[test]
    fn euler_gimbal_lock() {
        let d = matrix_to_euler(&RotationMatrix::about_y(FRAC_PI_2), EulerConvention::ZyxIntrinsic);
        assert!(d.gimbal_lock);
        assert_abs_diff_eq!(d.angles.pitch(), FRAC_PI_2, epsilon = 1e-12);
        assert_eq!(d.angles.roll(), 0.0);
        assert_abs_diff_eq!(d.angles.yaw(), 0.0, epsilon = 1e-12);

        // Roll and yaw are not separable here; the yaw absorbs yaw - roll.
        let locked = euler_to_matrix(&EulerAngles::zyx_intrinsic(0.3, -FRAC_PI_2, 0.5));
        let d = matrix_to_euler(&locked, EulerConvention::ZyxIntrinsic);
        assert!(d.gimbal_lock);
        assert_eq!(d.angles.roll(), 0.0);
        assert_abs_diff_eq!(*euler_to_matrix(&d.angles).matrix(), *locked.matrix(), epsilon = 1e-9);
    }

    #[test]
    fn euler_round_trip_away_from_lock() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let limit = FRAC_PI_2 - 0.01;
        for _ in 0..1000 {
            let e = EulerAngles::zyx_intrinsic(
                rng.random_range(-PI..PI),
                rng.random_range(-limit..limit),
                rng.random_range(-PI..PI),
            );
            let r = euler_to_matrix(&e);
            let d = matrix_to_euler(&r, EulerConvention::ZyxIntrinsic);
            assert!(!d.gimbal_lock);
            assert_abs_diff_eq!(d.angles.angles, e.angles, epsilon = 1e-9);
        }
    }

    #[test]
    fn convention_parsing() {
        assert_eq!(
            "ZYX_intrinsic".parse::<EulerConvention>().unwrap(),
            EulerConvention::ZyxIntrinsic
        );
        assert_eq!(
            "xyz-extrinsic".parse::<EulerConvention>().unwrap(),
            EulerConvention::XyzExtrinsic
        );
        assert!(matches!(
            "zxz".parse::<EulerConvention>(),
            Err(GeometryError::UnsupportedConvention(_))
        ));
    }

    #[test]
    fn rotate_examples() {
        let v = Vector3::new(1.0, -2.0, 0.5);
        assert_eq!(rotate(&RotationMatrix::identity(), &v), v);
        assert_abs_diff_eq!(
            rotate(&RotationMatrix::about_z(FRAC_PI_2), &Vector3::x()),
            Vector3::y(),
            epsilon = 1e-15
        );
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..200 {
            let r = random_rotation(&mut rng);
            let v = random_vector(&mut rng, 3.0);
            assert_abs_diff_eq!(rotate(&r, &v).norm(), v.norm(), epsilon = 1e-12);
        }
    }

    #[test]
    fn rotation_constructor_validates() {
        assert!(RotationMatrix::new(Matrix3::identity() * 1.01).is_err());
        assert!(RotationMatrix::new(Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0))).is_err());
        let mut m = Matrix3::identity();
        m[(0, 0)] = f64::NAN;
        assert!(RotationMatrix::new(m).is_err());
    }

    #[test]
    fn orthonormalize_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let r = random_rotation(&mut rng);
            assert_abs_diff_eq!(
                *orthonormalize(r.matrix()).unwrap().matrix(),
                *r.matrix(),
                epsilon = 1e-12
            );

            let noise = Matrix3::from_fn(|_, _| rng.random_range(-1.0..1.0)) * 1e-6;
            let fixed = orthonormalize(&(r.matrix() + noise)).unwrap();
            assert_valid(&fixed);
            assert!((fixed.matrix() - r.matrix()).norm() < 1e-5);

            let scaled = orthonormalize(&(r.matrix() * 1.0001)).unwrap();
            assert_abs_diff_eq!(*scaled.matrix(), *r.matrix(), epsilon = 1e-9);
        }
    }

    #[test]
    fn orthonormalize_rejects_garbage() {
        assert!(matches!(
            orthonormalize(&Matrix3::zeros()),
            Err(GeometryError::DegenerateMatrix { .. })
        ));
        let rank_two = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 0.0));
        assert!(orthonormalize(&rank_two).is_err());
        let reflection = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0));
        assert!(orthonormalize(&reflection).is_err());
        assert!(orthonormalize(&(Matrix3::identity() * 2.0)).is_err());
    }

    #[test]
    fn geodesic_distance_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let r = random_rotation(&mut rng);
        assert_eq!(geodesic_distance(&r, &r), 0.0);
        let quarter = so3_exp(&RotationVector::new(FRAC_PI_2, 0.0, 0.0));
        assert_abs_diff_eq!(
            geodesic_distance(&RotationMatrix::identity(), &quarter),
            FRAC_PI_2,
            epsilon = 1e-15
        );
        for _ in 0..500 {
            let a = random_rotation(&mut rng);
            let b = random_rotation(&mut rng);
            let d = geodesic_distance(&a, &b);
            let oracle = ((((a.matrix().transpose() * b.matrix()).trace()) - 1.0) / 2.0)
                .clamp(-1.0, 1.0)
                .acos();
            assert_abs_diff_eq!(d, oracle, epsilon = 1e-9);
            assert_eq!(d, geodesic_distance(&b, &a));
            assert!((0.0..=PI).contains(&d));
        }
    }

    proptest! {
        #[test]
        fn vee_inverts_hat(x in -10.0f64..10.0, y in -10.0f64..10.0, z in -10.0f64..10.0) {
            let v = Vector3::new(x, y, z);
            prop_assert_eq!(vee3(&hat3(&v)).unwrap(), v);
        }

        #[test]
        fn exp_log_round_trip(x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0, angle in 0.0f64..(PI - 1e-3)) {
            let dir = Vector3::new(x, y, z);
            prop_assume!(dir.norm() > 1e-3);
            let r = dir.normalize() * angle;
            let back = so3_log(&so3_exp(&RotationVector(r))).0;
            prop_assert!((back - r).norm() < 1e-9);
        }

        #[test]
        fn sign_flip_gives_identical_matrix(w in -1.0f64..1.0, x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0) {
            let n = (w * w + x * x + y * y + z * z).sqrt();
            prop_assume!(n > 1e-3);
            let q = UnitQuaternion::new(w / n, x / n, y / n, z / n).unwrap();
            let neg = UnitQuaternion::new(-w / n, -x / n, -y / n, -z / n).unwrap();
            prop_assert_eq!(quat_to_matrix(&q), quat_to_matrix(&neg));
        }

        #[test]
        fn orthonormalize_is_idempotent(entries in proptest::array::uniform9(-0.05f64..0.05), x in -3.0f64..3.0, y in -3.0f64..3.0, z in -3.0f64..3.0) {
            let base = so3_exp(&RotationVector::new(x, y, z));
            let m = base.matrix() + Matrix3::from_row_slice(&entries);
            let once = orthonormalize(&m).unwrap();
            let twice = orthonormalize(once.matrix()).unwrap();
            prop_assert!((once.matrix() - twice.matrix()).norm() < 1e-12);
            let (orth, det) = manifold_error(once.matrix());
            prop_assert!(orth < ORTHOGONALITY_TOL && (det - 1.0).abs() < ORTHOGONALITY_TOL);
        }
    }
}
