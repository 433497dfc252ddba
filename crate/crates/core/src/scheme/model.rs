//! The model equation `u_t + f(u)_x - delta g(u_xx)_x = 0` in conservative
//! method-of-lines form and its forward-Euler discretization.

use crate::error::{Error, Result};
use crate::flux::{engquist_osher_flux, ConvexFlux, DispersionFlux};
use crate::mesh::{fill_extended, BoundaryRule, StateField};
use crate::real::Real;

/// Fluxes, dispersion strength and boundary rule of one model problem.
#[derive(Debug, Clone, Copy)]
pub struct ModelEquation<T, F, G> {
    pub transport: F,
    pub dispersion: G,
    pub delta: T,
    pub boundary: BoundaryRule,
}

/// Scratch buffers reused across right-hand-side evaluations.
#[derive(Debug, Clone, Default)]
pub struct Workspace<T> {
    ext: Vec<T>,
    w: Vec<T>,
    flux: Vec<T>,
}

impl<T, F, G> ModelEquation<T, F, G>
where
    T: Real,
    F: ConvexFlux<T>,
    G: DispersionFlux<T>,
{
    pub fn new(transport: F, dispersion: G, delta: T, boundary: BoundaryRule) -> Self {
        ModelEquation {
            transport,
            dispersion,
            delta,
            boundary,
        }
    }

    /// Interface fluxes `f((u_i + u_{i+1})/2) - delta g_EO(w_i, w_{i+1})` for the
    /// `n + 1` interfaces `i + 1/2`, `i = -1..n-1`, left in `ws.flux`.
    fn interface_fluxes(&self, u: &[T], dx: T, ws: &mut Workspace<T>) {
        let n = u.len();
        fill_extended(u, self.boundary, 2, &mut ws.ext);
        let ext = &ws.ext;
        let inv_dx2 = (dx * dx).recip();
        let two = T::lit(2.0);
        let half = T::lit(0.5);

        // w[k] is the second difference at node k - 1
        ws.w.clear();
        ws.w.extend((1..=n + 2).map(|j| (ext[j - 1] - two * ext[j] + ext[j + 1]) * inv_dx2));

        // flux[k] sits between nodes k - 1 and k
        ws.flux.clear();
        ws.flux.extend((0..=n).map(|k| {
            let transport = self.transport.eval(half * (ext[k + 1] + ext[k + 2]));
            let dispersion = engquist_osher_flux(ws.w[k], ws.w[k + 1], &self.dispersion);
            transport - self.delta * dispersion
        }));
    }

    /// `du_i/dt = -(F_{i+1/2} - F_{i-1/2}) / dx` written into `out`.
    pub fn rhs_into(&self, u: &[T], dx: T, ws: &mut Workspace<T>, out: &mut [T]) -> Result<()> {
        self.interface_fluxes(u, dx, ws);
        let inv_dx = dx.recip();
        for (i, o) in out.iter_mut().enumerate() {
            *o = -(ws.flux[i + 1] - ws.flux[i]) * inv_dx;
        }
        self.sync_periodic(out);
        if let Some(i) = out.iter().position(|v| !v.is_finite()) {
            return Err(Error::BlowUp {
                step: 0,
                node: i,
                x: f64::NAN,
                time: f64::NAN,
            });
        }
        Ok(())
    }

    /// One forward-Euler step in place:
    /// `u_i <- u_i - (dt/dx) (F_{i+1/2} - F_{i-1/2})`.
    pub fn euler_step_in_place(&self, u: &mut [T], dx: T, dt: T, ws: &mut Workspace<T>) {
        self.interface_fluxes(u, dx, ws);
        let ratio = dt / dx;
        for (i, v) in u.iter_mut().enumerate() {
            *v -= ratio * (ws.flux[i + 1] - ws.flux[i]);
        }
        self.sync_periodic(u);
    }

    // The duplicate end node must stay bitwise equal to node 0.
    fn sync_periodic(&self, v: &mut [T]) {
        if self.boundary == BoundaryRule::Periodic {
            let n = v.len();
            v[n - 1] = v[0];
        }
    }

    pub fn rhs(&self, state: &StateField<T>) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); state.len()];
        self.rhs_into(&state.u, state.dx(), &mut Workspace::default(), &mut out)
            .map_err(|e| locate(e, state))?;
        Ok(out)
    }
}

fn locate<T: Real>(e: Error, state: &StateField<T>) -> Error {
    match e {
        Error::BlowUp { step, node, .. } => Error::BlowUp {
            step,
            node,
            x: state.grid.x(node).as_f64(),
            time: state.t.as_f64(),
        },
        other => other,
    }
}

/// Method-of-lines right-hand side of the model equation.
pub fn mol_rhs<T, F, G>(
    state: &StateField<T>,
    transport: F,
    dispersion: G,
    delta: T,
    boundary: BoundaryRule,
) -> Result<Vec<T>>
where
    T: Real,
    F: ConvexFlux<T>,
    G: DispersionFlux<T>,
{
    ModelEquation::new(transport, dispersion, delta, boundary).rhs(state)
}

/// One forward-Euler step of the fully discrete model scheme.
pub fn step_fully_discrete<T, F, G>(
    state: &StateField<T>,
    model: &ModelEquation<T, F, G>,
    dt: T,
) -> Result<StateField<T>>
where
    T: Real,
    F: ConvexFlux<T>,
    G: DispersionFlux<T>,
{
    let mut u = state.u.clone();
    model.euler_step_in_place(&mut u, state.dx(), dt, &mut Workspace::default());
    check_finite(&u, state, 1)?;
    Ok(StateField {
        grid: state.grid,
        u,
        t: state.t + dt,
    })
}

/// Classical four-stage Runge-Kutta step of the method of lines. Used only to
/// cross-check the forward-Euler scheme as `dt -> 0`.
pub fn step_rk4<T, F, G>(state: &StateField<T>, model: &ModelEquation<T, F, G>, dt: T) -> Result<StateField<T>>
where
    T: Real,
    F: ConvexFlux<T>,
    G: DispersionFlux<T>,
{
    let mut u = state.u.clone();
    Rk4Buffers::default().step(model, &mut u, state.dx(), dt)?;
    check_finite(&u, state, 1)?;
    Ok(StateField {
        grid: state.grid,
        u,
        t: state.t + dt,
    })
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Rk4Buffers<T> {
    ws: Workspace<T>,
    k: [Vec<T>; 4],
    stage: Vec<T>,
}

impl<T: Real> Rk4Buffers<T> {
    pub(crate) fn step<F, G>(&mut self, model: &ModelEquation<T, F, G>, u: &mut [T], dx: T, dt: T) -> Result<()>
    where
        F: ConvexFlux<T>,
        G: DispersionFlux<T>,
    {
        let n = u.len();
        let half = T::lit(0.5);
        for k in self.k.iter_mut() {
            k.resize(n, T::zero());
        }
        self.stage.resize(n, T::zero());
        let weights = [half, half, T::one()];
        model.rhs_into(u, dx, &mut self.ws, &mut self.k[0])?;
        for s in 0..3 {
            for i in 0..n {
                self.stage[i] = u[i] + weights[s] * dt * self.k[s][i];
            }
            model.rhs_into(&self.stage, dx, &mut self.ws, &mut self.k[s + 1])?;
        }
        let sixth = dt / T::lit(6.0);
        let two = T::lit(2.0);
        for i in 0..n {
            u[i] += sixth * (self.k[0][i] + two * self.k[1][i] + two * self.k[2][i] + self.k[3][i]);
        }
        Ok(())
    }
}

pub(crate) fn check_finite<T: Real>(u: &[T], state: &StateField<T>, step: usize) -> Result<()> {
    match u.iter().position(|v| !v.is_finite()) {
        Some(node) => Err(Error::BlowUp {
            step,
            node,
            x: state.grid.x(node).as_f64(),
            time: state.t.as_f64(),
        }),
        None => Ok(()),
    }
}
