//! Brenier-Osher scheme for the conservation law `u_t + f(u)_x = 0`, and the
//! first-order Godunov scheme used for entropy-solution references.

use crate::error::{Error, Result};
use crate::flux::{bo_interface_flux_into, godunov_flux, ConvexFlux};
use crate::mesh::{fill_extended, BoundaryRule, StateField};
use crate::real::Real;

use super::model::check_finite;

/// `max_i |f'(u_i)|`.
pub fn max_wave_speed<T: Real, F: ConvexFlux<T> + ?Sized>(u: &[T], f: &F) -> T {
    u.iter().map(|&v| f.derivative(v).abs()).fold(T::zero(), T::max)
}

/// Fails unless `dt * max|f'(u)| <= dx`.
pub fn check_cfl<T: Real, F: ConvexFlux<T> + ?Sized>(u: &[T], f: &F, dx: T, dt: T) -> Result<()> {
    let length = dt * max_wave_speed(u, f);
    if length > dx {
        return Err(Error::Cfl {
            courant_length: length.as_f64(),
            dx: dx.as_f64(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Default)]
pub(crate) struct ConservativeBuffers<T> {
    ext: Vec<T>,
    flux: Vec<T>,
}

impl<T: Real> ConservativeBuffers<T> {
    pub(crate) fn bo_step<F: ConvexFlux<T>>(&mut self, u: &mut [T], f: &F, dx: T, dt: T, rule: BoundaryRule) {
        bo_interface_flux_into(u, f, rule, &mut self.ext, &mut self.flux);
        apply_fluxes(u, &self.flux, dt / dx, rule);
    }

    pub(crate) fn godunov_step<F: ConvexFlux<T>>(&mut self, u: &mut [T], f: &F, dx: T, dt: T, rule: BoundaryRule) {
        fill_extended(u, rule, 1, &mut self.ext);
        self.flux.clear();
        self.flux.extend(self.ext.windows(2).map(|p| godunov_flux(p[0], p[1], f)));
        apply_fluxes(u, &self.flux, dt / dx, rule);
    }
}

fn apply_fluxes<T: Real>(u: &mut [T], flux: &[T], ratio: T, rule: BoundaryRule) {
    for (i, v) in u.iter_mut().enumerate() {
        *v -= ratio * (flux[i + 1] - flux[i]);
    }
    if rule == BoundaryRule::Periodic {
        let n = u.len();
        u[n - 1] = u[0];
    }
}

/// One forward-Euler step of the Brenier-Osher scheme
/// `du_i/dt + (f_{i+1/2} - f_{i-1/2}) / dx = 0`.
pub fn step_bo<T: Real, F: ConvexFlux<T>>(
    state: &StateField<T>,
    f: &F,
    dt: T,
    rule: BoundaryRule,
) -> Result<StateField<T>> {
    check_cfl(&state.u, f, state.dx(), dt)?;
    let mut u = state.u.clone();
    ConservativeBuffers::default().bo_step(&mut u, f, state.dx(), dt, rule);
    check_finite(&u, state, 1)?;
    Ok(StateField {
        grid: state.grid,
        u,
        t: state.t + dt,
    })
}

/// One step of the first-order Godunov scheme (piecewise-constant data).
pub fn step_godunov<T: Real, F: ConvexFlux<T>>(
    state: &StateField<T>,
    f: &F,
    dt: T,
    rule: BoundaryRule,
) -> Result<StateField<T>> {
    check_cfl(&state.u, f, state.dx(), dt)?;
    let mut u = state.u.clone();
    ConservativeBuffers::default().godunov_step(&mut u, f, state.dx(), dt, rule);
    check_finite(&u, state, 1)?;
    Ok(StateField {
        grid: state.grid,
        u,
        t: state.t + dt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::Transport;
    use crate::mesh::{make_grid, sample_profile, InitialProfile};

    #[test]
    fn constant_state_unchanged() {
        let g = make_grid(-1.0, 1.0, 21, false).unwrap();
        let s = StateField::from_fn(g, 0.0, |_| -0.3).unwrap();
        let next = step_bo(&s, &Transport::Burgers, 0.05, BoundaryRule::ConstantExtension).unwrap();
        assert_eq!(next.u, s.u);
    }

    #[test]
    fn symmetric_riemann_shock_is_stationary() {
        let g = make_grid(-1.0, 1.0, 101, true).unwrap();
        let mut s = sample_profile(&InitialProfile::riemann_with_origin(1.0, -1.0), &g).unwrap();
        let u0 = s.u.clone();
        for _ in 0..50 {
            s = step_bo(&s, &Transport::Burgers, 0.008, BoundaryRule::ConstantExtension).unwrap();
        }
        assert_eq!(s.u, u0);
    }

    #[test]
    fn cfl_violation_is_a_configuration_error() {
        let g = make_grid(-1.0, 1.0, 21, false).unwrap();
        let s = StateField::from_fn(g, 0.0, |_| 2.0).unwrap();
        let err = step_bo(&s, &Transport::Burgers, 0.06, BoundaryRule::ConstantExtension).unwrap_err();
        assert!(matches!(err, Error::Cfl { .. }));
        assert!(step_godunov(&s, &Transport::Burgers, 0.06, BoundaryRule::ConstantExtension).is_err());
    }

    /// Spatial convergence for a sine advected with unit speed on a periodic
    /// domain: error against the exact translate under grid refinement, with
    /// `dt ~ dx^2` so the first-order time error stays below the spatial one.
    #[test]
    fn bo_is_second_order_for_smooth_advection() {
        let f = Transport::Linear { speed: 1.0 };
        let t_end = 0.25;
        let errors: Vec<f64> = [80usize, 160, 320]
            .iter()
            .map(|&n| {
                let g = make_grid(-1.0, 1.0, n + 1, false).unwrap();
                let pi = std::f64::consts::PI;
                let mut s = StateField::from_fn(g, 0.0, |x| (pi * x).sin()).unwrap();
                let dx = g.dx();
                let steps = (t_end / (0.5 * dx * dx)).round() as usize;
                let dt = t_end / steps as f64;
                for _ in 0..steps {
                    s = step_bo(&s, &f, dt, BoundaryRule::Periodic).unwrap();
                }
                (0..n).map(|i| (s.u[i] - (pi * (g.x(i) - t_end)).sin()).abs()).sum::<f64>() * dx
            })
            .collect();
        let order = (errors[1] / errors[2]).log2();
        assert!(order >= 1.8, "errors {errors:?}, order {order}");
    }
}
