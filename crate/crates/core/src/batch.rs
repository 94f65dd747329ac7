//! Batch evaluation over slices of independent inputs.
//!
//! With the `parallel` feature (on by default) the top-level functions run on
//! rayon's global pool; without it they resolve to the [`seq`] versions. Both
//! return results in input order, so output is identical either way.

use nalgebra::Vector3;

use crate::se3::{self, Transform, Twist};

/// Single-threaded implementations, always available.
pub mod seq {
    use super::*;

    pub fn map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
        items.iter().map(f).collect()
    }

    pub fn transform_points(t: &Transform, points: &[Vector3<f64>]) -> Vec<Vector3<f64>> {
        map(points, |p| se3::transform_point(t, p))
    }

    pub fn exp_all(twists: &[Twist]) -> Vec<Transform> {
        map(twists, se3::se3_exp)
    }

    pub fn log_all(transforms: &[Transform]) -> Vec<Twist> {
        map(transforms, se3::se3_log)
    }

    /// Runs `trial(i)` for `i in 0..trials`.
    pub fn monte_carlo<U: Send>(trials: u64, trial: impl Fn(u64) -> U + Sync + Send) -> Vec<U> {
        (0..trials).map(trial).collect()
    }
}

/// Rayon-backed implementations.
#[cfg(feature = "parallel")]
pub mod par {
    use rayon::prelude::*;

    use super::*;

    pub fn map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
        items.par_iter().map(f).collect()
    }

    pub fn transform_points(t: &Transform, points: &[Vector3<f64>]) -> Vec<Vector3<f64>> {
        map(points, |p| se3::transform_point(t, p))
    }

    pub fn exp_all(twists: &[Twist]) -> Vec<Transform> {
        map(twists, se3::se3_exp)
    }

    pub fn log_all(transforms: &[Transform]) -> Vec<Twist> {
        map(transforms, se3::se3_log)
    }

    pub fn monte_carlo<U: Send>(trials: u64, trial: impl Fn(u64) -> U + Sync + Send) -> Vec<U> {
        (0..trials).into_par_iter().map(trial).collect()
    }
}

#[cfg(feature = "parallel")]
pub use par::{exp_all, log_all, map, monte_carlo, transform_points};
#[cfg(not(feature = "parallel"))]
pub use seq::{exp_all, log_all, map, monte_carlo, transform_points};
