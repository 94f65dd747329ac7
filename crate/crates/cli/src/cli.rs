//! Command-line front end.
//!
//! Every subcommand prints one JSON [`ResultReport`] on standard output and a
//! short human-readable summary on standard error. Failures print nothing on
//! standard output and exit with [`EXIT_USAGE`], [`EXIT_DATA`] or
//! [`EXIT_DEGENERATE`].

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rigidkit::{
    compose, from_matrix4, hand_eye_calibrate, pivot_calibrate, register_point_sets, se3_exp, se3_log, GeometryError,
    Matrix4, PoseSample, Transform, Twist, Vector3,
};
use thiserror::Error;

use crate::io::{self, IoError, PoseRecord};
use crate::report::{Converted, PoseResult, ReportBody, ResidualStats, ResultReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "rigidkit", version, about = "Rigid-body transforms and calibration solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print one pose in another representation.
    Convert {
        #[command(flatten)]
        input: PoseInput,
        /// Output representation.
        #[arg(long, value_enum)]
        to: Representation,
    },
    /// Chain poses left to right: --pose flags first, then each file's rows in order.
    Compose {
        /// Inline pose `tx,ty,tz,qw,qx,qy,qz`; repeatable.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_list::<7>)]
        pose: Vec<[f64; 7]>,
        /// Pose CSV files.
        files: Vec<PathBuf>,
    },
    /// Exponential map: twist `vx,vy,vz,wx,wy,wz` (linear first) to a pose.
    Exp {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_list::<6>)]
        twist: [f64; 6],
    },
    /// Logarithm map: pose to twist `(v, w)`.
    Log {
        #[command(flatten)]
        input: PoseInput,
    },
    /// Rigid registration of index-paired point sets (source onto target).
    Register { source: PathBuf, target: PathBuf },
    /// Pivot calibration from a pose CSV of the tracked tool.
    Pivot { poses: PathBuf },
    /// Hand-eye AX = XB from two absolute pose streams of equal length.
    ///
    /// Consecutive relative motions A_i = P_i⁻¹ P_{i+1} are formed from each
    /// stream and must satisfy A_i X = X B_i.
    Handeye { a_poses: PathBuf, b_poses: PathBuf },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct PoseInput {
    /// Inline pose `tx,ty,tz,qw,qx,qy,qz`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_list::<7>)]
    pose: Option<[f64; 7]>,
    /// Row-major homogeneous matrix, 16 comma-separated values.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_list::<16>)]
    matrix4: Option<[f64; 16]>,
    /// Pose CSV holding exactly one pose.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Representation {
    Matrix4,
    Quat,
    EulerZyx,
    Rotvec,
}

fn parse_list<const N: usize>(text: &str) -> Result<[f64; N], String> {
    io::parse_fields::<N>(text, 0).map_err(|e| match e {
        IoError::Parse { reason, .. } => reason,
        other => other.to_string(),
    })
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{context}: {source}")]
    Input { context: String, source: IoError },
    #[error("{0}")]
    Geometry(#[from] GeometryError),
    #[error("failed to write report: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Geometry(e) if e.is_degenerate() => EXIT_DEGENERATE,
            CliError::Input { .. } | CliError::Geometry(_) | CliError::Output(_) => EXIT_DATA,
        }
    }
}

struct Outcome {
    report: ResultReport,
    summary: String,
}

fn read_poses(path: &Path) -> Result<Vec<PoseRecord>, CliError> {
    let context = path.display().to_string();
    let file = File::open(path).map_err(|e| CliError::Input {
        context: context.clone(),
        source: e.into(),
    })?;
    io::parse_pose_csv(BufReader::new(file)).map_err(|source| CliError::Input { context, source })
}

fn read_transforms(path: &Path) -> Result<Vec<Transform>, CliError> {
    read_poses(path)?
        .iter()
        .map(|p| p.to_transform().map_err(CliError::from))
        .collect()
}

fn read_points(path: &Path) -> Result<Vec<Vector3<f64>>, CliError> {
    let context = path.display().to_string();
    let file = File::open(path).map_err(|e| CliError::Input {
        context: context.clone(),
        source: e.into(),
    })?;
    let points = io::parse_points_csv(BufReader::new(file)).map_err(|source| CliError::Input { context, source })?;
    Ok(points.iter().map(|p| p.to_vector()).collect())
}

fn inline_pose(values: [f64; 7]) -> Result<Transform, CliError> {
    let record = PoseRecord::from_values(values, 0).map_err(|source| CliError::Input {
        context: "--pose".into(),
        source,
    })?;
    Ok(record.to_transform()?)
}

impl PoseInput {
    fn resolve(&self) -> Result<Transform, CliError> {
        if let Some(values) = self.pose {
            return inline_pose(values);
        }
        if let Some(values) = self.matrix4 {
            return Ok(from_matrix4(&Matrix4::from_row_slice(&values))?);
        }
        let path = self
            .file
            .as_ref()
            .ok_or_else(|| CliError::Usage("no pose given".into()))?;
        let poses = read_transforms(path)?;
        match poses.as_slice() {
            [single] => Ok(*single),
            other => Err(CliError::Input {
                context: path.display().to_string(),
                source: IoError::Parse {
                    line: 0,
                    reason: format!("expected exactly one pose, found {}", other.len()),
                },
            }),
        }
    }
}

fn execute(command: Command) -> Result<Outcome, CliError> {
    match command {
        Command::Convert { input, to } => {
            let t = input.resolve()?;
            let (converted, name) = match to {
                Representation::Matrix4 => (Converted::matrix4(&t), "matrix4"),
                Representation::Quat => (Converted::quaternion(&t), "quat"),
                Representation::EulerZyx => (Converted::euler_zyx(&t), "euler-zyx"),
                Representation::Rotvec => (Converted::rotation_vector(&t), "rotvec"),
            };
            Ok(Outcome {
                report: ResultReport::new("convert", ReportBody::Convert(converted), None),
                summary: format!("convert: pose written as {name}"),
            })
        }
        Command::Compose { pose, files } => {
            let mut chain = pose.into_iter().map(inline_pose).collect::<Result<Vec<_>, _>>()?;
            for path in &files {
                chain.extend(read_transforms(path)?);
            }
            if chain.is_empty() {
                return Err(CliError::Usage("compose needs at least one --pose or pose file".into()));
            }
            let count = chain.len();
            let result = chain.iter().fold(Transform::identity(), |acc, t| compose(&acc, t));
            Ok(Outcome {
                report: ResultReport::new(
                    "compose",
                    ReportBody::Composed {
                        count,
                        composed: PoseResult::new(&result),
                    },
                    None,
                ),
                summary: format!("compose: chained {count} poses"),
            })
        }
        Command::Exp { twist } => {
            let xi = Twist::new(
                Vector3::new(twist[0], twist[1], twist[2]),
                Vector3::new(twist[3], twist[4], twist[5]),
            );
            let t = se3_exp(&xi);
            Ok(Outcome {
                report: ResultReport::new("exp", ReportBody::Pose(PoseResult::new(&t)), None),
                summary: format!("exp: rotation angle {:.6} rad", xi.w.norm()),
            })
        }
        Command::Log { input } => {
            let xi = se3_log(&input.resolve()?);
            Ok(Outcome {
                report: ResultReport::new("log", ReportBody::twist(&xi), None),
                summary: format!("log: rotation angle {:.6} rad", xi.w.norm()),
            })
        }
        Command::Register { source, target } => {
            let p = read_points(&source)?;
            let q = read_points(&target)?;
            let result = register_point_sets(&p, &q)?;
            let stats = ResidualStats::from_values(&result.per_point_residuals);
            Ok(Outcome {
                summary: format!(
                    "register: {} point pairs, rms {:.6e}, max {:.6e}",
                    stats.count, stats.rms.0, stats.max.0
                ),
                report: ResultReport::new("register", ReportBody::registration(&result), Some(stats)),
            })
        }
        Command::Pivot { poses } => {
            let samples: Vec<PoseSample> = read_transforms(&poses)?.into_iter().map(PoseSample::from).collect();
            let result = pivot_calibrate(&samples)?;
            let stats = ResidualStats::from_values(&result.residuals);
            Ok(Outcome {
                summary: format!(
                    "pivot: {} poses, tip ({:.6}, {:.6}, {:.6}), rms {:.6e}",
                    stats.count, result.tip_offset.x, result.tip_offset.y, result.tip_offset.z, stats.rms.0
                ),
                report: ResultReport::new("pivot", ReportBody::pivot(&result), Some(stats)),
            })
        }
        Command::Handeye { a_poses, b_poses } => {
            let a_stream = read_transforms(&a_poses)?;
            let b_stream = read_transforms(&b_poses)?;
            if a_stream.len() != b_stream.len() {
                return Err(CliError::Geometry(GeometryError::LengthMismatch {
                    left: a_stream.len(),
                    right: b_stream.len(),
                }));
            }
            let relative = |stream: &[Transform], path: &Path| {
                io::relative_motions(stream).map_err(|source| CliError::Input {
                    context: path.display().to_string(),
                    source,
                })
            };
            let a_list = relative(&a_stream, &a_poses)?;
            let b_list = relative(&b_stream, &b_poses)?;
            let result = hand_eye_calibrate(&a_list, &b_list)?;
            let stats = ResidualStats::from_values(&result.translation_residuals);
            Ok(Outcome {
                summary: format!(
                    "handeye: {} motion pairs, rotation rms {:.6e} rad, translation rms {:.6e}",
                    a_list.len(),
                    result.rotation_rms,
                    result.translation_rms
                ),
                report: ResultReport::new("handeye", ReportBody::hand_eye(&result), Some(stats)),
            })
        }
    }
}

/// Runs one invocation; `args` includes the program name. Returns the exit code.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };

    let rendered = execute(cli.command).and_then(|outcome| {
        let json = outcome.report.to_json().map_err(|e| CliError::Output(e.to_string()))?;
        Ok((json, outcome.summary))
    });
    match rendered {
        Ok((json, summary)) => {
            if let Err(e) = stdout.write_all(json.as_bytes()).and_then(|_| stdout.flush()) {
                let _ = writeln!(stderr, "error: failed to write report: {e}");
                return EXIT_DATA;
            }
            let _ = writeln!(stderr, "{summary}");
            EXIT_OK
        }
        Err(e) => {
            let kind = match e.exit_code() {
                EXIT_DEGENERATE => "degenerate geometry",
                EXIT_USAGE => "usage",
                _ => "data error",
            };
            let _ = writeln!(stderr, "error ({kind}): {e}");
            e.exit_code()
        }
    }
}
