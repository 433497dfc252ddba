//! Distances between solutions and the ripple measurements.

use serde::Serialize;

use crate::analysis::traveling::TravelingWaveProfile;
use crate::error::{Error, Result};
use crate::mesh::{interpolate_linear, StateField};
use crate::real::Real;
use crate::scheme::Trajectory;

fn check_same_grid<T: Real>(a: &StateField<T>, b: &StateField<T>) -> Result<()> {
    if a.grid != b.grid {
        return Err(Error::Alignment(format!(
            "grids differ: {} nodes on [{}, {}] vs {} nodes on [{}, {}]",
            a.len(),
            a.grid.x_min(),
            a.grid.x_max(),
            b.len(),
            b.grid.x_min(),
            b.grid.x_max()
        )));
    }
    Ok(())
}

/// `dx * sum |a_i - b_i|`.
pub fn l1_distance<T: Real>(a: &StateField<T>, b: &StateField<T>) -> Result<T> {
    check_same_grid(a, b)?;
    Ok(a.dx() * a.u.iter().zip(&b.u).map(|(&x, &y)| (x - y).abs()).sum::<T>())
}

/// `max |a_i - b_i|`.
pub fn linf_distance<T: Real>(a: &StateField<T>, b: &StateField<T>) -> Result<T> {
    check_same_grid(a, b)?;
    Ok(a.u.iter().zip(&b.u).fold(T::zero(), |m, (&x, &y)| m.max((x - y).abs())))
}

/// Relative threshold for significant extrema, as a fraction of the jump.
pub const RIPPLE_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RippleMetrics<T> {
    /// L1 distance to the reference.
    pub l1: T,
    /// How far `u` leaves the range of the reference, below or above.
    pub amplitude: T,
    /// Significant extrema of `u` in excess of those of the reference.
    pub count: usize,
    /// The extrema threshold used, `RIPPLE_FLOOR` times the reference range.
    pub floor: T,
}

/// Ripple metrics of the final snapshot against `reference`.
pub fn ripple_metrics<T: Real>(trajectory: &Trajectory<T>, reference: &StateField<T>) -> Result<RippleMetrics<T>> {
    ripple_metrics_of(trajectory.last(), reference)
}

/// Ripple metrics of one state.
///
/// The reference itself has extrema (the peak in front of a shock), and the
/// smeared shock of `u` sits next to them, so ripples are counted as the
/// excess of significant extrema of `u` over those of the reference rather
/// than as extrema of the difference.
pub fn ripple_metrics_of<T: Real>(state: &StateField<T>, reference: &StateField<T>) -> Result<RippleMetrics<T>> {
    let l1 = l1_distance(state, reference)?;
    let (rmin, rmax) = (reference.min(), reference.max());
    let jump = rmax - rmin;
    let floor = T::lit(RIPPLE_FLOOR) * if jump > T::zero() { jump } else { T::one() };
    let amplitude = (rmin - state.min()).max(state.max() - rmax).max(T::zero());
    let count = significant_extrema(&state.u, floor).saturating_sub(significant_extrema(&reference.u, floor));
    Ok(RippleMetrics { l1, amplitude, count, floor })
}

/// Number of interior turning points of `u` whose swing on both sides exceeds
/// `floor` (a zig-zag filter; the end points never count).
pub fn significant_extrema<T: Real>(u: &[T], floor: T) -> usize {
    let Some(&first) = u.first() else { return 0 };
    // direction: 0 undecided, 1 rising, -1 falling
    let mut dir = 0i8;
    let mut lo = first;
    let mut hi = first;
    let mut extreme = first;
    let mut turns = 0;
    for &x in &u[1..] {
        match dir {
            0 => {
                lo = lo.min(x);
                hi = hi.max(x);
                if x - lo > floor {
                    dir = 1;
                    extreme = x;
                } else if hi - x > floor {
                    dir = -1;
                    extreme = x;
                }
            }
            1 => {
                if x > extreme {
                    extreme = x;
                } else if extreme - x > floor {
                    turns += 1;
                    dir = -1;
                    extreme = x;
                }
            }
            _ => {
                if x < extreme {
                    extreme = x;
                } else if x - extreme > floor {
                    turns += 1;
                    dir = 1;
                    extreme = x;
                }
            }
        }
    }
    turns
}

/// Position of the first `+` to `-` zero crossing of `u`, by linear interpolation.
pub fn zero_crossing<T: Real>(state: &StateField<T>) -> Result<T> {
    let u = &state.u;
    for i in 0..u.len() {
        if u[i] == T::zero() && i > 0 && i + 1 < u.len() && u[i - 1] > T::zero() && u[i + 1] < T::zero() {
            return Ok(state.grid.x(i));
        }
        if i + 1 < u.len() && u[i] > T::zero() && u[i + 1] < T::zero() {
            let (x0, x1) = (state.grid.x(i), state.grid.x(i + 1));
            return Ok(x0 + (x1 - x0) * u[i] / (u[i] - u[i + 1]));
        }
    }
    Err(Error::Alignment("no decreasing zero crossing in the solution".into()))
}

/// L-infinity distance between a state and the traveling-wave profile
/// shifted to the state's zero crossing.
pub fn attractor_distance<T: Real>(state: &StateField<T>, profile: &TravelingWaveProfile<T>) -> Result<T> {
    let x0 = zero_crossing(state)?;
    Ok(state
        .u
        .iter()
        .enumerate()
        .fold(T::zero(), |m, (i, &u)| m.max((u - profile.eval(state.grid.x(i) - x0)).abs())))
}

/// L-infinity distance between `a(x)` and `b(x0b + scale (x - x0a))`, each
/// aligned at its zero crossing; `b` is interpolated linearly.
pub fn scaled_profile_distance<T: Real>(a: &StateField<T>, b: &StateField<T>, scale: T) -> Result<T> {
    let x0a = zero_crossing(a)?;
    let x0b = zero_crossing(b)?;
    let xb = b.grid.nodes();
    Ok(a.u.iter().enumerate().fold(T::zero(), |m, (i, &u)| {
        let y = interpolate_linear(&xb, &b.u, x0b + scale * (a.grid.x(i) - x0a));
        m.max((u - y).abs())
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::traveling::traveling_wave;
    use crate::mesh::GridSpec;

    fn field(u: Vec<f64>) -> StateField<f64> {
        let grid = GridSpec::symmetric_unit(u.len() - 1, false).build().unwrap();
        StateField::new(grid, u, 0.0).unwrap()
    }

    #[test]
    fn identical_states_have_zero_metrics() {
        let a = field((0..41).map(|i| (-((i as f64 - 20.0) / 5.0).powi(2)).exp()).collect());
        let m = ripple_metrics_of(&a, &a).unwrap();
        assert_eq!((m.l1, m.amplitude, m.count), (0.0, 0.0, 0));
    }

    #[test]
    fn one_dip_is_one_ripple() {
        let reference = field((0..41).map(|i| if (10..30).contains(&i) { 1.0 } else { 0.0 }).collect());
        let mut u = reference.u.clone();
        u[6] = -0.2;
        let m = ripple_metrics_of(&field(u), &reference).unwrap();
        assert_eq!(m.count, 1);
        assert_eq!(m.amplitude, 0.2);
        assert!((m.l1 - 0.2 * 0.05).abs() < 1e-15);
    }

    #[test]
    fn zig_zag_counts() {
        assert_eq!(significant_extrema(&[0.0, 1.0, 0.0], 0.1), 1);
        assert_eq!(significant_extrema(&[0.0, 1.0, 0.95, 1.0, 0.0], 0.1), 1);
        assert_eq!(significant_extrema(&[0.0, 1.0, 0.0, 1.0, 0.0], 0.1), 3);
        assert_eq!(significant_extrema(&[0.0, 0.5, 1.0], 0.1), 0);
        assert_eq!(significant_extrema::<f64>(&[], 0.1), 0);
    }

    #[test]
    fn grid_mismatch_is_alignment_error() {
        let a = field(vec![0.0; 11]);
        let b = field(vec![0.0; 21]);
        assert!(matches!(l1_distance(&a, &b), Err(Error::Alignment(_))));
    }

    #[test]
    fn profile_against_itself() {
        let grid = GridSpec::symmetric_unit(200, true).build().unwrap();
        let p = traveling_wave(1.0, 1e-5, &grid.nodes()).unwrap();
        let s = StateField::new(grid, p.u.clone(), 0.0).unwrap();
        assert_eq!(attractor_distance(&s, &p).unwrap(), 0.0);
        assert!(zero_crossing(&field(vec![1.0; 11])).is_err());
    }
}
