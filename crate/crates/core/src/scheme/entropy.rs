//! Fine-grid entropy-solution reference for the conservation law.

use crate::error::{Error, Result};
use crate::flux::ConvexFlux;
use crate::mesh::{interpolate_linear, sample_profile, BoundaryRule, Grid1D, InitialProfile, StateField};
use crate::real::Real;

use super::bo::{max_wave_speed, ConservativeBuffers};

/// Default refinement of the reference grid over the comparison grid.
pub const DEFAULT_FACTOR: usize = 16;
/// Smallest admissible refinement factor.
pub const MIN_FACTOR: usize = 8;
/// Courant number of the reference scheme.
pub const REFERENCE_CFL: f64 = 0.5;
/// Largest L1 change tolerated when the reference grid is refined once more.
pub const SELF_CONVERGENCE_TOL: f64 = 1e-3;

/// Runs the first-order Godunov scheme at CFL 0.5 on the given grid up to
/// exactly `t_end`.
pub fn godunov_solution<T: Real, F: ConvexFlux<T>>(
    initial: &StateField<T>,
    f: &F,
    t_end: T,
    rule: BoundaryRule,
) -> Result<StateField<T>> {
    let mut u = initial.u.clone();
    let dx = initial.dx();
    let speed = max_wave_speed(&u, f);
    if t_end > T::zero() {
        let steps = if speed > T::zero() {
            (t_end * speed / (T::lit(REFERENCE_CFL) * dx)).ceil().to_usize().unwrap_or(1).max(1)
        } else {
            1
        };
        let dt = t_end / T::count(steps);
        let mut buffers = ConservativeBuffers::default();
        for _ in 0..steps {
            buffers.godunov_step(&mut u, f, dx, dt, rule);
        }
    }
    StateField::new(initial.grid, u, initial.t + t_end)
}

/// Entropy solution of `u_t + f(u)_x = 0` at `t_end`, computed by first-order
/// Godunov on a grid `factor` times finer than `grid` and sampled back onto
/// `grid` by linear interpolation.
pub fn entropy_reference<T: Real, F: ConvexFlux<T>>(
    profile: &InitialProfile<T>,
    f: &F,
    t_end: T,
    grid: &Grid1D<T>,
    factor: usize,
) -> Result<StateField<T>> {
    if factor < MIN_FACTOR {
        return Err(Error::config(format!(
            "reference grid must be at least {MIN_FACTOR}x finer, got {factor}x"
        )));
    }
    let fine = grid.refined(factor)?;
    let fine_profile = match profile {
        InitialProfile::CustomSamples { values } => {
            let xs = grid.nodes();
            InitialProfile::CustomSamples {
                values: fine.nodes().into_iter().map(|x| interpolate_linear(&xs, values, x)).collect(),
            }
        }
        other => other.clone(),
    };
    let initial = sample_profile(&fine_profile, &fine)?;
    let solution = godunov_solution(&initial, f, t_end, BoundaryRule::ConstantExtension)?;
    let xs = fine.nodes();
    StateField::from_fn(*grid, t_end, |x| interpolate_linear(&xs, &solution.u, x))
}

/// [`entropy_reference`] with a self-convergence check: doubling the factor
/// must change the result by less than [`SELF_CONVERGENCE_TOL`] in L1.
pub fn entropy_reference_checked<T: Real, F: ConvexFlux<T>>(
    profile: &InitialProfile<T>,
    f: &F,
    t_end: T,
    grid: &Grid1D<T>,
    factor: usize,
) -> Result<StateField<T>> {
    let coarse = entropy_reference(profile, f, t_end, grid, factor)?;
    let fine = entropy_reference(profile, f, t_end, grid, 2 * factor)?;
    let change = coarse
        .u
        .iter()
        .zip(&fine.u)
        .map(|(a, b)| (*a - *b).abs())
        .sum::<T>()
        * grid.dx();
    if change >= T::lit(SELF_CONVERGENCE_TOL) {
        return Err(Error::Reference(format!(
            "refining the reference grid from {factor}x to {}x changed it by {change} in L1",
            2 * factor
        )));
    }
    Ok(fine)
}
