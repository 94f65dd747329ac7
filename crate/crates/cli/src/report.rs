//! JSON result reports.
//!
//! Field order is fixed by the struct layouts and every float is written with
//! 17 significant digits in scientific notation, so identical inputs always
//! produce byte-identical output and every `f64` round-trips exactly.

use std::str::FromStr;

use rigidkit::{to_matrix4, Transform};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::io::PoseRecord;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// An `f64` that serializes with 17 significant digits.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Sig17(pub f64);

impl Sig17 {
    pub fn format(value: f64) -> String {
        format!("{value:.16e}")
    }
}

impl From<f64> for Sig17 {
    fn from(v: f64) -> Self {
        Sig17(v)
    }
}

impl Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(serde::ser::Error::custom(format!(
                "cannot serialize non-finite value {}",
                self.0
            )));
        }
        let number = serde_json::Number::from_str(&Self::format(self.0)).map_err(serde::ser::Error::custom)?;
        number.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Sig17 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        f64::deserialize(deserializer).map(Sig17)
    }
}

fn sig3(v: &rigidkit::Vector3<f64>) -> [Sig17; 3] {
    [Sig17(v.x), Sig17(v.y), Sig17(v.z)]
}

fn matrix_rows(t: &Transform) -> [[Sig17; 4]; 4] {
    let m = to_matrix4(t);
    std::array::from_fn(|r| std::array::from_fn(|c| Sig17(m[(r, c)])))
}

/// Summary statistics over a residual list.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualStats {
    pub rms: Sig17,
    pub max: Sig17,
    pub count: usize,
}

impl ResidualStats {
    pub fn from_values(values: &[f64]) -> Self {
        Self {
            rms: Sig17(rigidkit::calibration::rms(values)),
            max: Sig17(values.iter().copied().fold(0.0, f64::max)),
            count: values.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoseResult {
    pub pose: PoseRecord,
    pub matrix4: [[Sig17; 4]; 4],
}

impl PoseResult {
    pub fn new(t: &Transform) -> Self {
        Self {
            pose: PoseRecord::from_transform(t),
            matrix4: matrix_rows(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuaternionWxyz {
    pub w: Sig17,
    pub x: Sig17,
    pub y: Sig17,
    pub z: Sig17,
}

/// Output of `convert`, one shape per requested representation.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Converted {
    Matrix4 {
        representation: &'static str,
        matrix4: [[Sig17; 4]; 4],
    },
    Quaternion {
        representation: &'static str,
        translation: [Sig17; 3],
        quaternion: QuaternionWxyz,
    },
    EulerZyx {
        representation: &'static str,
        translation: [Sig17; 3],
        roll: Sig17,
        pitch: Sig17,
        yaw: Sig17,
        gimbal_lock: bool,
    },
    RotationVector {
        representation: &'static str,
        translation: [Sig17; 3],
        rotation_vector: [Sig17; 3],
    },
}

impl Converted {
    pub fn matrix4(t: &Transform) -> Self {
        Converted::Matrix4 {
            representation: "matrix4",
            matrix4: matrix_rows(t),
        }
    }

    pub fn quaternion(t: &Transform) -> Self {
        let [w, x, y, z] = rigidkit::matrix_to_quat(&t.rotation).to_array();
        Converted::Quaternion {
            representation: "quat",
            translation: sig3(&t.translation),
            quaternion: QuaternionWxyz {
                w: Sig17(w),
                x: Sig17(x),
                y: Sig17(y),
                z: Sig17(z),
            },
        }
    }

    pub fn euler_zyx(t: &Transform) -> Self {
        let d = rigidkit::matrix_to_euler(&t.rotation, rigidkit::EulerConvention::ZyxIntrinsic);
        Converted::EulerZyx {
            representation: "euler-zyx",
            translation: sig3(&t.translation),
            roll: Sig17(d.angles.roll()),
            pitch: Sig17(d.angles.pitch()),
            yaw: Sig17(d.angles.yaw()),
            gimbal_lock: d.gimbal_lock,
        }
    }

    pub fn rotation_vector(t: &Transform) -> Self {
        let r = rigidkit::so3_log(&t.rotation);
        Converted::RotationVector {
            representation: "rotvec",
            translation: sig3(&t.translation),
            rotation_vector: sig3(r.vector()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ReportBody {
    Convert(Converted),
    Pose(PoseResult),
    Composed {
        count: usize,
        #[serde(flatten)]
        composed: PoseResult,
    },
    Twist {
        /// `(v, w)`: linear part first.
        twist: [Sig17; 6],
    },
    Registration {
        transform: PoseRecord,
        matrix4: [[Sig17; 4]; 4],
        per_point_residuals: Vec<Sig17>,
    },
    Pivot {
        tip_offset: [Sig17; 3],
        pivot_point: [Sig17; 3],
    },
    HandEye {
        transform: PoseRecord,
        matrix4: [[Sig17; 4]; 4],
        rotation_rms_rad: Sig17,
        translation_rms: Sig17,
        motion_pairs: usize,
    },
}

impl ReportBody {
    pub fn registration(result: &rigidkit::RegistrationResult) -> Self {
        ReportBody::Registration {
            transform: PoseRecord::from_transform(&result.transform),
            matrix4: matrix_rows(&result.transform),
            per_point_residuals: result.per_point_residuals.iter().copied().map(Sig17).collect(),
        }
    }

    pub fn pivot(result: &rigidkit::PivotResult) -> Self {
        ReportBody::Pivot {
            tip_offset: sig3(&result.tip_offset),
            pivot_point: sig3(&result.pivot_point),
        }
    }

    pub fn hand_eye(result: &rigidkit::HandEyeResult) -> Self {
        ReportBody::HandEye {
            transform: PoseRecord::from_transform(&result.x),
            matrix4: matrix_rows(&result.x),
            rotation_rms_rad: Sig17(result.rotation_rms),
            translation_rms: Sig17(result.translation_rms),
            motion_pairs: result.translation_residuals.len(),
        }
    }

    pub fn twist(xi: &rigidkit::Twist) -> Self {
        let v = xi.to_vector();
        ReportBody::Twist {
            twist: std::array::from_fn(|i| Sig17(v[i])),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultReport {
    pub tool_version: String,
    pub command: String,
    pub result: ReportBody,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residuals: Option<ResidualStats>,
}

impl ResultReport {
    pub fn new(command: &str, result: ReportBody, residuals: Option<ResidualStats>) -> Self {
        Self {
            tool_version: TOOL_VERSION.to_string(),
            command: command.to_string(),
            result,
            residuals,
        }
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> Result<String, serde_json::Error> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }
}
