//! File formats, JSON reports and the batch command line for `rigidkit`.

pub mod cli;
pub mod io;
pub mod report;

pub use cli::{run_cli, EXIT_DATA, EXIT_DEGENERATE, EXIT_OK, EXIT_USAGE};
pub use io::{parse_points_csv, parse_pose_csv, relative_motions, IoError, PointRecord, PoseRecord};
pub use report::{ResidualStats, ResultReport, Sig17};
