//! Calibration solvers: index-paired rigid registration, pivot calibration of
//! a tracked tool tip, and hand-eye calibration `AX = XB`.
//!
//! All three are closed-form least-squares solves built on SVD and the SO(3)
//! log map. They are single-threaded and deterministic.

use nalgebra::{DMatrix, DVector, Matrix3, SymmetricEigen, Vector3};

use crate::error::{GeometryError, Result};
use crate::se3::Transform;
use crate::so3::{geodesic_distance, orthonormalize, so3_log, svd3, RotationMatrix};

/// Registration is rejected when both minor singular values of the
/// cross-covariance fall below this fraction of the largest.
pub const REGISTRATION_SINGULAR_RATIO: f64 = 1e-9;

/// Pivot calibration is rejected above this condition number of the 6×6
/// normal matrix.
pub const PIVOT_MAX_CONDITION: f64 = 1e8;

/// Hand-eye rotation axes closer than this (radians) count as parallel.
pub const AXIS_PARALLEL_TOL: f64 = 1e-6;

/// One recorded pose of a tracked device in the tracker frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PoseSample {
    pub pose: Transform,
}

impl From<Transform> for PoseSample {
    fn from(pose: Transform) -> Self {
        Self { pose }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegistrationResult {
    /// Maps source points onto target points.
    pub transform: Transform,
    pub rms_error: f64,
    pub per_point_residuals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PivotResult {
    /// Tip position in the tool frame.
    pub tip_offset: Vector3<f64>,
    /// Fixed pivot location in the tracker frame.
    pub pivot_point: Vector3<f64>,
    pub rms_error: f64,
    /// `|R_i · tip + t_i - pivot|` per sample.
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HandEyeResult {
    pub x: Transform,
    /// Radians.
    pub rotation_rms: f64,
    pub translation_rms: f64,
    /// Geodesic distance between `R_A R_X` and `R_X R_B` per motion pair.
    pub rotation_residuals: Vec<f64>,
    /// Norm of the stacked translation equation residual per motion pair.
    pub translation_residuals: Vec<f64>,
}

pub fn rms(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    (values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64).sqrt()
}

fn centroid(points: &[Vector3<f64>]) -> Vector3<f64> {
    points.iter().fold(Vector3::zeros(), |acc, p| acc + p) / points.len() as f64
}

/// Least-squares rigid transform taking `source[i]` onto `target[i]`.
pub fn register_point_sets(source: &[Vector3<f64>], target: &[Vector3<f64>]) -> Result<RegistrationResult> {
    if source.len() != target.len() {
        return Err(GeometryError::LengthMismatch {
            left: source.len(),
            right: target.len(),
        });
    }
    if source.len() < 3 {
        return Err(GeometryError::TooFewPoints {
            required: 3,
            got: source.len(),
        });
    }
    if source.iter().chain(target).any(|p| !p.iter().all(|c| c.is_finite())) {
        return Err(GeometryError::DegenerateGeometry("non-finite coordinates".into()));
    }

    let source_mean = centroid(source);
    let target_mean = centroid(target);
    let h: Matrix3<f64> = source.iter().zip(target).fold(Matrix3::zeros(), |acc, (p, q)| {
        acc + (p - source_mean) * (q - target_mean).transpose()
    });

    let (u, sigma, v_t) = svd3(&h);
    let mut sorted = [sigma[0], sigma[1], sigma[2]];
    sorted.sort_by(|a, b| b.total_cmp(a));
    let floor = REGISTRATION_SINGULAR_RATIO * sorted[0];
    if sorted[0] == 0.0 || (sorted[1] < floor && sorted[2] < floor) {
        return Err(GeometryError::DegenerateGeometry(
            "points are collinear or coincident; rotation about their line is unconstrained".into(),
        ));
    }

    let v = v_t.transpose();
    let ut = u.transpose();
    let mut correction = Vector3::new(1.0, 1.0, 1.0);
    correction[sigma.imin()] = (v * ut).determinant().signum();
    let rotation = RotationMatrix::from_matrix_unchecked(v * Matrix3::from_diagonal(&correction) * ut);
    let translation = target_mean - rotation.matrix() * source_mean;
    let transform = Transform::new(rotation, translation);

    let per_point_residuals: Vec<f64> = source
        .iter()
        .zip(target)
        .map(|(p, q)| (rotation.matrix() * p + translation - q).norm())
        .collect();
    Ok(RegistrationResult {
        transform,
        rms_error: rms(&per_point_residuals),
        per_point_residuals,
    })
}

/// Solves `R_i · tip + t_i = pivot` for all samples in the least-squares sense.
pub fn pivot_calibrate(samples: &[PoseSample]) -> Result<PivotResult> {
    if samples.len() < 3 {
        return Err(GeometryError::TooFewPoses {
            required: 3,
            got: samples.len(),
        });
    }

    let rows = 3 * samples.len();
    let mut a = DMatrix::<f64>::zeros(rows, 6);
    let mut b = DVector::<f64>::zeros(rows);
    for (i, sample) in samples.iter().enumerate() {
        let r = sample.pose.rotation.matrix();
        a.fixed_view_mut::<3, 3>(3 * i, 0).copy_from(r);
        a.fixed_view_mut::<3, 3>(3 * i, 3).copy_from(&(-Matrix3::identity()));
        b.fixed_rows_mut::<3>(3 * i).copy_from(&(-sample.pose.translation));
    }

    let x = solve_least_squares(a, &b, PIVOT_MAX_CONDITION, |condition| {
        GeometryError::DegenerateMotion(format!(
            "pivot normal matrix condition number {condition:.3e} exceeds {PIVOT_MAX_CONDITION:.0e}; \
             the tool needs more rotational diversity"
        ))
    })?;
    let tip_offset = Vector3::new(x[0], x[1], x[2]);
    let pivot_point = Vector3::new(x[3], x[4], x[5]);

    let residuals: Vec<f64> = samples
        .iter()
        .map(|s| (s.pose.rotation.matrix() * tip_offset + s.pose.translation - pivot_point).norm())
        .collect();
    Ok(PivotResult {
        tip_offset,
        pivot_point,
        rms_error: rms(&residuals),
        residuals,
    })
}

/// Least squares through a column-pivoted Householder QR. Fails with
/// `on_degenerate(cond)` when the condition number of the normal matrix
/// `AᵀA` exceeds `max_condition`.
fn solve_least_squares(
    a: DMatrix<f64>,
    b: &DVector<f64>,
    max_condition: f64,
    on_degenerate: impl FnOnce(f64) -> GeometryError,
) -> Result<DVector<f64>> {
    let normal = SymmetricEigen::new(a.transpose() * &a);
    let largest = normal.eigenvalues.max();
    let smallest = normal.eigenvalues.min();
    let condition = if smallest > 0.0 {
        largest / smallest
    } else {
        f64::INFINITY
    };
    if condition.is_nan() || condition > max_condition {
        return Err(on_degenerate(condition));
    }

    let cols = a.ncols();
    let qr = a.col_piv_qr();
    let mut rhs = b.clone();
    qr.q_tr_mul(&mut rhs);
    let r = qr.r();
    let mut x = r
        .solve_upper_triangular(&rhs.rows(0, cols).into_owned())
        .ok_or_else(|| singular_factor(condition))?;
    qr.p().inv_permute_rows(&mut x);
    Ok(x)
}

fn singular_factor(condition: f64) -> GeometryError {
    GeometryError::DegenerateMotion(format!("triangular factor is singular (condition {condition:.3e})"))
}

/// Angle between the lines spanned by `a` and `b` (sign ignored).
fn axis_angle_between(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    a.cross(b).norm().atan2(a.dot(b).abs())
}

/// Park–Martin hand-eye calibration on relative-motion pairs with
/// `a_list[i] · X = X · b_list[i]`.
pub fn hand_eye_calibrate(a_list: &[Transform], b_list: &[Transform]) -> Result<HandEyeResult> {
    if a_list.len() != b_list.len() {
        return Err(GeometryError::LengthMismatch {
            left: a_list.len(),
            right: b_list.len(),
        });
    }
    if a_list.len() < 2 {
        return Err(GeometryError::TooFewMotions {
            required: 2,
            got: a_list.len(),
        });
    }

    let alphas: Vec<Vector3<f64>> = a_list.iter().map(|a| so3_log(&a.rotation).0).collect();
    let betas: Vec<Vector3<f64>> = b_list.iter().map(|b| so3_log(&b.rotation).0).collect();

    let reference = alphas
        .iter()
        .max_by(|p, q| p.norm().total_cmp(&q.norm()))
        .copied()
        .unwrap_or_default();
    let diverse = reference.norm() > 0.0
        && alphas
            .iter()
            .any(|alpha| alpha.norm() > 0.0 && axis_angle_between(alpha, &reference) > AXIS_PARALLEL_TOL);
    if !diverse {
        return Err(GeometryError::DegenerateMotion(
            "all motions rotate about parallel axes; X is not unique (need two non-parallel rotation axes)".into(),
        ));
    }

    // Rotation: R_X β_i ≈ α_i.
    let m: Matrix3<f64> = alphas
        .iter()
        .zip(&betas)
        .fold(Matrix3::zeros(), |acc, (alpha, beta)| acc + beta * alpha.transpose());
    let rotation_x = orthonormalize(&hand_eye_rotation(&m)).map_err(|e| {
        GeometryError::DegenerateMotion(format!("rotation estimate could not be projected onto SO(3): {e}"))
    })?;

    // Translation: (R_A - I) t_X = R_X t_B - t_A.
    let n = a_list.len();
    let mut c = DMatrix::<f64>::zeros(3 * n, 3);
    let mut d = DVector::<f64>::zeros(3 * n);
    for (i, (a, b)) in a_list.iter().zip(b_list).enumerate() {
        c.fixed_view_mut::<3, 3>(3 * i, 0)
            .copy_from(&(a.rotation.matrix() - Matrix3::identity()));
        d.fixed_rows_mut::<3>(3 * i)
            .copy_from(&(rotation_x.matrix() * b.translation - a.translation));
    }
    let t = solve_least_squares(c, &d, 1e12, |condition| {
        GeometryError::DegenerateMotion(format!(
            "translation system is rank deficient (condition {condition:.3e})"
        ))
    })?;
    let translation_x = Vector3::new(t[0], t[1], t[2]);
    let x = Transform::new(rotation_x, translation_x);

    let rotation_residuals: Vec<f64> = a_list
        .iter()
        .zip(b_list)
        .map(|(a, b)| geodesic_distance(&a.rotation.compose(&rotation_x), &rotation_x.compose(&b.rotation)))
        .collect();
    let translation_residuals: Vec<f64> = a_list
        .iter()
        .zip(b_list)
        .map(|(a, b)| {
            ((a.rotation.matrix() - Matrix3::identity()) * translation_x
                - (rotation_x.matrix() * b.translation - a.translation))
                .norm()
        })
        .collect();

    Ok(HandEyeResult {
        x,
        rotation_rms: rms(&rotation_residuals),
        translation_rms: rms(&translation_residuals),
        rotation_residuals,
        translation_residuals,
    })
}

/// `(MᵀM)^{-1/2} Mᵀ` via a symmetric eigendecomposition. When the rotation
/// axes span only a plane `MᵀM` is singular, and the orthogonal Procrustes
/// solution from the SVD of `M` is used instead.
fn hand_eye_rotation(m: &Matrix3<f64>) -> Matrix3<f64> {
    let eigen = SymmetricEigen::new(m.transpose() * m);
    let largest = eigen.eigenvalues.max();
    let smallest = eigen.eigenvalues.min();
    if largest > 0.0 && smallest > 1e-12 * largest {
        let inv_sqrt = eigen.eigenvalues.map(|l| 1.0 / l.sqrt());
        let q = &eigen.eigenvectors;
        let r = q * Matrix3::from_diagonal(&inv_sqrt) * q.transpose() * m.transpose();
        if r.determinant() > 0.0 {
            return r;
        }
    }
    let (u, sigma, v_t) = svd3(m);
    let v = v_t.transpose();
    let ut = u.transpose();
    let mut correction = Vector3::new(1.0, 1.0, 1.0);
    correction[sigma.imin()] = (v * ut).determinant().signum();
    v * Matrix3::from_diagonal(&correction) * ut
}
