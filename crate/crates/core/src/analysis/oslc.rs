//! One-sided Lipschitz checks on the forward-difference slope seminorm.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::Real;
use crate::scheme::Trajectory;

/// Default relative slack for the nonincreasing check.
pub const DEFAULT_SLACK: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OslcReport<T> {
    pub times: Vec<T>,
    /// `max_i (u_{i+1} - u_i) / dx` per snapshot.
    pub slopes: Vec<T>,
    /// The bound each slope was compared with.
    pub bounds: Vec<T>,
    /// Index of the first snapshot over its bound.
    pub first_violation: Option<usize>,
    pub passed: bool,
}

/// Checks that `forward_slope_max` is nonincreasing along the trajectory:
/// each slope may exceed the smallest earlier one by at most
/// `DEFAULT_SLACK` relative.
pub fn check_oslc<T: Real>(trajectory: &Trajectory<T>) -> Result<OslcReport<T>> {
    check_oslc_with(trajectory, T::lit(DEFAULT_SLACK))
}

pub fn check_oslc_with<T: Real>(trajectory: &Trajectory<T>, slack: T) -> Result<OslcReport<T>> {
    let (times, slopes) = slope_series(trajectory)?;
    Ok(check_nonincreasing(times, slopes, slack))
}

/// The nonincreasing check on a bare series.
pub fn check_nonincreasing<T: Real>(times: Vec<T>, slopes: Vec<T>, slack: T) -> OslcReport<T> {
    let mut bounds = Vec::with_capacity(slopes.len());
    let mut running = T::infinity();
    for &s in &slopes {
        bounds.push(if running.is_finite() { running + slack * running.abs() } else { running });
        running = running.min(s);
    }
    finish(times, slopes, bounds)
}

/// `1 / (1/p0 + alpha t)`, the decay bound on the slope of an entropy
/// solution of a convex conservation law. `p0 = 0` (nonincreasing data) gives
/// `1 / (alpha t)`.
pub fn oslc_bound<T: Real>(p0: T, alpha: T, t: T) -> T {
    let inv = if p0 > T::zero() { T::one() / p0 } else { T::zero() };
    let denom = inv + alpha * t;
    if denom > T::zero() {
        T::one() / denom
    } else {
        T::infinity()
    }
}

/// Checks `forward_slope_max(t) <= factor / (1/p0 + alpha t)` at every
/// snapshot, with `p0` the positive part of the initial slope maximum.
pub fn check_decay_bound<T: Real>(trajectory: &Trajectory<T>, alpha: T, factor: T) -> Result<OslcReport<T>> {
    let (times, slopes) = slope_series(trajectory)?;
    let p0 = slopes[0].pos();
    let bounds = times.iter().map(|&t| factor * oslc_bound(p0, alpha, t)).collect();
    Ok(finish(times, slopes, bounds))
}

fn slope_series<T: Real>(trajectory: &Trajectory<T>) -> Result<(Vec<T>, Vec<T>)> {
    if trajectory.snapshots.len() < 2 {
        return Err(Error::Precondition(format!(
            "slope checks need at least 2 snapshots, got {}",
            trajectory.snapshots.len()
        )));
    }
    Ok(trajectory.snapshots.iter().map(|s| (s.t, s.forward_slope_max())).unzip())
}

fn finish<T: Real>(times: Vec<T>, slopes: Vec<T>, bounds: Vec<T>) -> OslcReport<T> {
    let first_violation = slopes.iter().zip(&bounds).position(|(s, b)| s > b);
    OslcReport { times, slopes, bounds, first_violation, passed: first_violation.is_none() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_values() {
        assert_eq!(oslc_bound(2.0, 1.0, 0.0), 2.0);
        assert_eq!(oslc_bound(2.0, 1.0, 0.5), 1.0);
        assert_eq!(oslc_bound(0.0, 1.0, 0.25), 4.0);
        assert_eq!(oslc_bound(0.0, 1.0, 0.0), f64::INFINITY);
    }

    #[test]
    fn nonincreasing_series() {
        let r = check_nonincreasing(vec![0.0, 1.0, 2.0], vec![3.0, 2.0, 2.001], 1e-3);
        assert!(r.passed, "{r:?}");
        let r = check_nonincreasing(vec![0.0, 1.0, 2.0], vec![3.0, 2.0, 2.1], 1e-3);
        assert_eq!(r.first_violation, Some(2));
        let r = check_nonincreasing(vec![0.0, 1.0], vec![0.0, 0.0], 1e-3);
        assert!(r.passed);
    }
}
