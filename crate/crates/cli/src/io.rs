//! CSV readers and writers for pose and point datasets.
//!
//! Pose files hold one `tx,ty,tz,qw,qx,qy,qz` row per pose (scalar-first
//! quaternion); point files hold `x,y,z` rows. Lines whose first
//! non-blank character is `#` are comments, blank lines are skipped, and the
//! exact header line may appear once before the first data row.

use std::io::{BufRead, Write};

use rigidkit::{compose, inverse, matrix_to_quat, quat_to_matrix, GeometryError, Transform, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::report::Sig17;

pub const POSE_HEADER: &str = "tx,ty,tz,qw,qx,qy,qz";
pub const POINT_HEADER: &str = "x,y,z";

/// Quaternions further than this from unit norm are rejected on ingest;
/// anything closer is silently renormalized.
pub const INGEST_NORM_TOL: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{}{reason}", at_line(*line))]
    Parse { line: usize, reason: String },

    #[error("{}quaternion norm {norm:.6} is not within {INGEST_NORM_TOL:.0e} of 1", at_line(*line))]
    NonUnitQuaternion { line: usize, norm: f64 },

    #[error("need at least {required} poses, got {got}")]
    TooFewPoses { required: usize, got: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Line 0 marks values that did not come from a file.
fn at_line(line: usize) -> String {
    if line == 0 {
        String::new()
    } else {
        format!("line {line}: ")
    }
}

/// One pose row. Quaternion components are renormalized when parsed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseRecord {
    pub tx: Sig17,
    pub ty: Sig17,
    pub tz: Sig17,
    pub qw: Sig17,
    pub qx: Sig17,
    pub qy: Sig17,
    pub qz: Sig17,
}

impl PoseRecord {
    pub fn translation(&self) -> Vector3<f64> {
        Vector3::new(self.tx.0, self.ty.0, self.tz.0)
    }

    pub fn quaternion(&self) -> [f64; 4] {
        [self.qw.0, self.qx.0, self.qy.0, self.qz.0]
    }

    pub fn to_transform(&self) -> Result<Transform, GeometryError> {
        let q = UnitQuaternion::from_array(self.quaternion())?;
        Ok(Transform::new(quat_to_matrix(&q), self.translation()))
    }

    pub fn from_transform(t: &Transform) -> Self {
        let [qw, qx, qy, qz] = matrix_to_quat(&t.rotation).to_array();
        Self {
            tx: Sig17(t.translation.x),
            ty: Sig17(t.translation.y),
            tz: Sig17(t.translation.z),
            qw: Sig17(qw),
            qx: Sig17(qx),
            qy: Sig17(qy),
            qz: Sig17(qz),
        }
    }

    /// Builds a record from seven raw values, applying the ingest norm check.
    pub fn from_values(values: [f64; 7], line: usize) -> Result<Self, IoError> {
        let [tx, ty, tz, qw, qx, qy, qz] = values;
        let norm = (qw * qw + qx * qx + qy * qy + qz * qz).sqrt();
        if norm.is_nan() || (norm - 1.0).abs() > INGEST_NORM_TOL {
            return Err(IoError::NonUnitQuaternion { line, norm });
        }
        Ok(Self {
            tx: Sig17(tx),
            ty: Sig17(ty),
            tz: Sig17(tz),
            qw: Sig17(qw / norm),
            qx: Sig17(qx / norm),
            qy: Sig17(qy / norm),
            qz: Sig17(qz / norm),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointRecord {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl PointRecord {
    pub fn to_vector(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }
}

/// Parses comma-separated finite numbers, requiring exactly `N` fields.
pub fn parse_fields<const N: usize>(text: &str, line: usize) -> Result<[f64; N], IoError> {
    let tokens: Vec<&str> = text.split(',').map(str::trim).collect();
    if tokens.len() != N {
        return Err(IoError::Parse {
            line,
            reason: format!("expected {N} fields, found {}", tokens.len()),
        });
    }
    let mut out = [0.0; N];
    for (slot, token) in out.iter_mut().zip(&tokens) {
        let value: f64 = token.parse().map_err(|_| IoError::Parse {
            line,
            reason: format!("invalid number `{token}`"),
        })?;
        if !value.is_finite() {
            return Err(IoError::Parse {
                line,
                reason: format!("non-finite value `{token}`"),
            });
        }
        *slot = value;
    }
    Ok(out)
}

/// Yields `(line_number, trimmed_text)` for data lines, dropping comments,
/// blanks and a leading header.
fn data_lines<R: BufRead>(reader: R, header: &'static str) -> impl Iterator<Item = Result<(usize, String), IoError>> {
    let mut seen_data = false;
    reader.lines().enumerate().filter_map(move |(idx, line)| {
        let line = match line {
            Ok(line) => line,
            Err(e) => return Some(Err(e.into())),
        };
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            return None;
        }
        if !seen_data && text == header {
            seen_data = true;
            return None;
        }
        seen_data = true;
        Some(Ok((idx + 1, text.to_string())))
    })
}

pub fn parse_pose_csv<R: BufRead>(reader: R) -> Result<Vec<PoseRecord>, IoError> {
    data_lines(reader, POSE_HEADER)
        .map(|item| {
            let (line, text) = item?;
            PoseRecord::from_values(parse_fields::<7>(&text, line)?, line)
        })
        .collect()
}

pub fn parse_points_csv<R: BufRead>(reader: R) -> Result<Vec<PointRecord>, IoError> {
    data_lines(reader, POINT_HEADER)
        .map(|item| {
            let (line, text) = item?;
            let [x, y, z] = parse_fields::<3>(&text, line)?;
            Ok(PointRecord { x, y, z })
        })
        .collect()
}

/// Writes poses with a header, using shortest round-trip formatting.
pub fn write_pose_csv<W: Write>(mut out: W, poses: &[PoseRecord]) -> std::io::Result<()> {
    writeln!(out, "{POSE_HEADER}")?;
    for p in poses {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            p.tx.0, p.ty.0, p.tz.0, p.qw.0, p.qx.0, p.qy.0, p.qz.0
        )?;
    }
    Ok(())
}

pub fn write_points_csv<W: Write>(mut out: W, points: &[PointRecord]) -> std::io::Result<()> {
    writeln!(out, "{POINT_HEADER}")?;
    for p in points {
        writeln!(out, "{},{},{}", p.x, p.y, p.z)?;
    }
    Ok(())
}

/// Consecutive relative motions `T_i⁻¹ · T_{i+1}`.
pub fn relative_motions(poses: &[Transform]) -> Result<Vec<Transform>, IoError> {
    if poses.len() < 2 {
        return Err(IoError::TooFewPoses {
            required: 2,
            got: poses.len(),
        });
    }
    Ok(poses.windows(2).map(|w| compose(&inverse(&w[0]), &w[1])).collect())
}
