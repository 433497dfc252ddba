//! Time stepping: run configurations, the scheme drivers and trajectories.

pub mod bo;
pub mod entropy;
pub mod model;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux::{Dispersion, DispersionFlux, Transport};
use crate::mesh::{sample_profile, BoundaryRule, Grid1D, GridSpec, InitialProfile, StateField};
use crate::real::Real;

pub use bo::{check_cfl, max_wave_speed, step_bo, step_godunov};
pub use entropy::{entropy_reference, entropy_reference_checked};
pub use model::{mol_rhs, step_fully_discrete, step_rk4, ModelEquation, Workspace};

use bo::ConservativeBuffers;
use model::Rk4Buffers;

/// Which discrete evolution a run uses.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    /// Forward-Euler scheme for the model equation.
    #[default]
    ModelFullyDiscrete,
    /// Method of lines for the model equation integrated with classical RK4.
    ModelMol,
    /// Brenier-Osher scheme for `u_t + f(u)_x = 0` (dispersion ignored).
    BoConservationLaw,
    /// First-order Godunov scheme for `u_t + f(u)_x = 0` (dispersion ignored).
    EntropyReference,
}

impl SchemeKind {
    fn hard_cfl(self) -> bool {
        matches!(self, SchemeKind::BoConservationLaw | SchemeKind::EntropyReference)
    }
}

/// Full parameterization of one simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig<T> {
    pub grid: GridSpec<T>,
    pub profile: InitialProfile<T>,
    pub transport: Transport<T>,
    pub dispersion: Dispersion<T>,
    pub delta: T,
    pub dt: T,
    pub t_end: T,
    #[serde(default)]
    pub boundary: BoundaryRule,
    #[serde(default)]
    pub snapshot_times: Vec<T>,
    #[serde(default)]
    pub scheme: SchemeKind,
}

impl<T: Real> RunConfig<T> {
    /// Burgers transport on `intervals` intervals of `[-1, 1]` with constant
    /// extension at the ends and the fully discrete scheme.
    pub fn new(
        intervals: usize,
        origin_node: bool,
        profile: InitialProfile<T>,
        dispersion: Dispersion<T>,
        delta: T,
        dt: T,
        t_end: T,
    ) -> Self {
        RunConfig {
            grid: GridSpec::symmetric_unit(intervals, origin_node),
            profile,
            transport: Transport::Burgers,
            dispersion,
            delta,
            dt,
            t_end,
            boundary: BoundaryRule::ConstantExtension,
            snapshot_times: Vec::new(),
            scheme: SchemeKind::ModelFullyDiscrete,
        }
    }

    pub fn model(&self) -> ModelEquation<T, Transport<T>, Dispersion<T>> {
        ModelEquation::new(self.transport, self.dispersion, self.delta, self.boundary)
    }

    /// Checks the configuration and returns its grid.
    pub fn validate(&self) -> Result<Grid1D<T>> {
        let grid = self.grid.build()?;
        if !(self.dt > T::zero() && self.dt.is_finite()) {
            return Err(Error::config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= T::zero() && self.t_end.is_finite()) {
            return Err(Error::config(format!("t_end must be nonnegative, got {}", self.t_end)));
        }
        if !(self.delta >= T::zero() && self.delta.is_finite()) {
            return Err(Error::config(format!("delta must be nonnegative, got {}", self.delta)));
        }
        if let Some(t) = self.snapshot_times.iter().find(|&&t| !(t >= T::zero() && t <= self.t_end)) {
            return Err(Error::config(format!(
                "snapshot time {t} outside [0, {}]",
                self.t_end
            )));
        }
        if let Transport::Linear { speed } = self.transport {
            if !speed.is_finite() {
                return Err(Error::config("linear transport speed must be finite"));
            }
        }
        self.dispersion.validate()?;
        self.profile.validate()?;
        Ok(grid)
    }

    /// Number of steps needed to reach `t` (rounded to the nearest step).
    pub fn steps_to(&self, t: T) -> usize {
        (t / self.dt).round().to_usize().unwrap_or(0)
    }

    pub fn initial_state(&self) -> Result<StateField<T>> {
        let grid = self.validate()?;
        let state = sample_profile(&self.profile, &grid)?;
        self.boundary.check(&state.u)?;
        Ok(state)
    }
}

/// Per-snapshot diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics<T> {
    pub time: T,
    pub mass: T,
    pub forward_slope_max: T,
    pub min: T,
    pub max: T,
}

impl<T: Real> Diagnostics<T> {
    pub fn of(state: &StateField<T>, rule: BoundaryRule) -> Self {
        Diagnostics {
            time: state.t,
            mass: state.mass(rule),
            forward_slope_max: state.forward_slope_max(),
            min: state.min(),
            max: state.max(),
        }
    }
}

/// Snapshots and diagnostics of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub config: RunConfig<T>,
    pub snapshots: Vec<StateField<T>>,
    pub diagnostics: Vec<Diagnostics<T>>,
    pub steps: usize,
    /// Time actually reached, `steps * dt`.
    pub t_reached: T,
    /// Set by [`run_to_steady`] when the steadiness criterion was met.
    pub steady_at: Option<T>,
}

impl<T: Real> Trajectory<T> {
    pub fn last(&self) -> &StateField<T> {
        self.snapshots.last().expect("trajectory holds at least the initial state")
    }

    pub fn initial(&self) -> &StateField<T> {
        &self.snapshots[0]
    }

    fn record(&mut self, state: StateField<T>) {
        self.diagnostics.push(Diagnostics::of(&state, self.config.boundary));
        self.snapshots.push(state);
    }
}

/// Advances a state in place with the scheme of a configuration.
#[derive(Debug, Clone)]
pub struct Stepper<T> {
    config: RunConfig<T>,
    grid: Grid1D<T>,
    step: usize,
    workspace: Workspace<T>,
    rk4: Rk4Buffers<T>,
    conservative: ConservativeBuffers<T>,
}

impl<T: Real> Stepper<T> {
    pub fn new(config: &RunConfig<T>) -> Result<Self> {
        let grid = config.validate()?;
        Ok(Stepper {
            config: config.clone(),
            grid,
            step: 0,
            workspace: Workspace::default(),
            rk4: Rk4Buffers::default(),
            conservative: ConservativeBuffers::default(),
        })
    }

    pub fn steps_taken(&self) -> usize {
        self.step
    }

    pub fn time(&self) -> T {
        T::count(self.step) * self.config.dt
    }

    pub fn advance(&mut self, u: &mut [T]) -> Result<()> {
        let c = &self.config;
        let dx = self.grid.dx();
        match c.scheme {
            SchemeKind::ModelFullyDiscrete => {
                c.model().euler_step_in_place(u, dx, c.dt, &mut self.workspace);
            }
            SchemeKind::ModelMol => {
                self.rk4.step(&c.model(), u, dx, c.dt).map_err(|e| self.blow_up(e))?;
            }
            SchemeKind::BoConservationLaw => {
                check_cfl(u, &c.transport, dx, c.dt)?;
                self.conservative.bo_step(u, &c.transport, dx, c.dt, c.boundary);
            }
            SchemeKind::EntropyReference => {
                check_cfl(u, &c.transport, dx, c.dt)?;
                self.conservative.godunov_step(u, &c.transport, dx, c.dt, c.boundary);
            }
        }
        self.step += 1;
        if let Some(node) = u.iter().position(|v| !v.is_finite()) {
            return Err(Error::BlowUp {
                step: self.step,
                node,
                x: self.grid.x(node).as_f64(),
                time: self.time().as_f64(),
            });
        }
        Ok(())
    }

    fn blow_up(&self, e: Error) -> Error {
        match e {
            Error::BlowUp { node, .. } => Error::BlowUp {
                step: self.step + 1,
                node,
                x: self.grid.x(node).as_f64(),
                time: self.time().as_f64(),
            },
            other => other,
        }
    }
}

fn check_transport_cfl<T: Real>(config: &RunConfig<T>, initial: &StateField<T>) -> Result<()> {
    let result = check_cfl(&initial.u, &config.transport, initial.dx(), config.dt);
    match result {
        Err(e) if config.scheme.hard_cfl() => Err(e),
        Err(e) => {
            log::warn!("{e}; continuing, blow-up detection is active");
            Ok(())
        }
        Ok(()) => Ok(()),
    }
}

/// Integrates a configuration from `t = 0` to `t_end`.
///
/// `t_end` and the snapshot times are rounded to whole steps; the initial and
/// final states are always recorded.
pub fn run<T: Real>(config: &RunConfig<T>) -> Result<Trajectory<T>> {
    let initial = config.initial_state()?;
    check_transport_cfl(config, &initial)?;
    let total = config.steps_to(config.t_end);
    let mut marks: Vec<usize> = config
        .snapshot_times
        .iter()
        .map(|&t| config.steps_to(t).min(total))
        .chain([0, total])
        .collect();
    marks.sort_unstable();
    marks.dedup();

    let mut stepper = Stepper::new(config)?;
    let mut u = initial.u.clone();
    let mut trajectory = Trajectory {
        config: config.clone(),
        snapshots: Vec::with_capacity(marks.len()),
        diagnostics: Vec::with_capacity(marks.len()),
        steps: 0,
        t_reached: T::zero(),
        steady_at: None,
    };
    trajectory.record(initial.clone());
    for &mark in &marks[1..] {
        while stepper.steps_taken() < mark {
            stepper.advance(&mut u)?;
        }
        trajectory.record(StateField::new(initial.grid, u.clone(), stepper.time())?);
    }
    trajectory.steps = stepper.steps_taken();
    trajectory.t_reached = stepper.time();
    Ok(trajectory)
}

/// Integrates until the step-to-step change `max_i |u_i^{n+1} - u_i^n|`
/// drops below `tol`, or until `t_end` of the configuration.
///
/// Returns the initial and final snapshots; `steady_at` holds the time at
/// which the criterion was met.
pub fn run_to_steady<T: Real>(config: &RunConfig<T>, tol: T) -> Result<Trajectory<T>> {
    let initial = config.initial_state()?;
    check_transport_cfl(config, &initial)?;
    let total = config.steps_to(config.t_end);
    let mut stepper = Stepper::new(config)?;
    let mut u = initial.u.clone();
    let mut previous = u.clone();
    let mut steady_at = None;
    while stepper.steps_taken() < total {
        previous.copy_from_slice(&u);
        stepper.advance(&mut u)?;
        let change = u
            .iter()
            .zip(&previous)
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), T::max);
        if change < tol {
            steady_at = Some(stepper.time());
            break;
        }
    }
    let mut trajectory = Trajectory {
        config: config.clone(),
        snapshots: Vec::with_capacity(2),
        diagnostics: Vec::with_capacity(2),
        steps: stepper.steps_taken(),
        t_reached: stepper.time(),
        steady_at,
    };
    trajectory.record(initial.clone());
    trajectory.record(StateField::new(initial.grid, u, stepper.time())?);
    Ok(trajectory)
}

/// Fraction of the linear forward-Euler stability limit `dx^3 / (4 delta)` of
/// the `g = -|s|` dispersion used by [`suggest_dt`].
pub const DISPERSIVE_DT_FACTOR: f64 = 0.125;

/// Fraction of the forward-Euler anti-diffusion limit `sqrt(8 delta dx) / max|u|^2`
/// used by [`suggest_dt`].
pub const ANTIDIFFUSION_DT_FACTOR: f64 = 0.5;

/// Suggested time step for a configuration, the minimum of
///
/// - `0.5 dx / max|f'(u0)|` (transport CFL),
/// - `k dx^3 / (delta * s)` with `k = DISPERSIVE_DT_FACTOR` and
///   `s = max(1, max|g'(w0)|)` the dispersive stiffness of the initial data,
/// - `a sqrt(8 delta dx) / max|u0|^2` with `a = ANTIDIFFUSION_DT_FACTOR`, which
///   keeps the `dt u^2 / 2` anti-diffusion of forward Euler on centered
///   transport below the damping of the dispersive term.
pub fn suggest_dt<T: Real>(config: &RunConfig<T>) -> Result<T> {
    let grid = config.grid.build()?;
    let initial = sample_profile(&config.profile, &grid)?;
    let dx = grid.dx();
    let speed = max_wave_speed(&initial.u, &config.transport);
    let mut dt = T::infinity();
    if speed > T::zero() {
        dt = dt.min(T::lit(0.5) * dx / speed);
    }
    if config.delta > T::zero() {
        let stiffness = initial
            .second_difference(config.boundary)
            .into_iter()
            .map(|w| config.dispersion.derivative(w).abs())
            .fold(T::one(), T::max);
        dt = dt.min(T::lit(DISPERSIVE_DT_FACTOR) * dx * dx * dx / (config.delta * stiffness));
        let umax = initial.u.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        if umax > T::zero() {
            let limit = (T::lit(8.0) * config.delta * dx).sqrt() / (umax * umax);
            dt = dt.min(T::lit(ANTIDIFFUSION_DT_FACTOR) * limit);
        }
    }
    if !dt.is_finite() {
        // no transport and no dispersion: any step is stable
        dt = config.t_end.max(T::one());
    }
    Ok(dt)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_config(intervals: usize, g: Dispersion<f64>, delta: f64, dt: f64) -> RunConfig<f64> {
        RunConfig::new(intervals, false, InitialProfile::exponential(), g, delta, dt, 0.5)
    }

    #[test]
    fn zero_end_time_gives_initial_data_only() {
        let mut c = exp_config(100, Dispersion::Abs, 5e-4, 1e-4);
        c.t_end = 0.0;
        let traj = run(&c).unwrap();
        assert_eq!(traj.snapshots.len(), 1);
        assert_eq!(traj.last().u, c.initial_state().unwrap().u);
        assert_eq!(traj.steps, 0);
    }

    #[test]
    fn snapshots_round_to_whole_steps() {
        let mut c = exp_config(100, Dispersion::Abs, 5e-4, 2e-3);
        c.t_end = 0.1;
        c.snapshot_times = vec![0.0501, 0.02, 0.1];
        let traj = run(&c).unwrap();
        let times: Vec<f64> = traj.snapshots.iter().map(|s| s.t).collect();
        assert_eq!(times.len(), 4);
        assert!(times.windows(2).all(|w| w[0] < w[1]));
        assert!((times[2] - 0.05).abs() < 1e-15);
        assert_eq!(traj.steps, 50);
        assert_eq!(traj.diagnostics.len(), 4);
    }

    #[test]
    fn run_is_deterministic() {
        let mut c = exp_config(100, Dispersion::Square, 5e-4, 5e-6);
        c.t_end = 0.05;
        assert_eq!(run(&c).unwrap(), run(&c).unwrap());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut c = exp_config(100, Dispersion::Abs, 5e-4, 1e-4);
        c.dt = 0.0;
        assert!(matches!(run(&c), Err(Error::Config(_))));
        let mut c = exp_config(100, Dispersion::Abs, 5e-4, 1e-4);
        c.snapshot_times = vec![0.7];
        assert!(matches!(run(&c), Err(Error::Config(_))));
        let mut c = exp_config(100, Dispersion::Abs, 5e-4, 1e-4);
        c.profile = InitialProfile::riemann_with_origin(1.0, -1.0);
        c.grid.n_points = 102;
        c.grid.origin_node = false;
        assert!(matches!(run(&c), Err(Error::Config(_))));
    }

    #[test]
    fn bo_run_enforces_cfl() {
        let mut c = exp_config(100, Dispersion::Abs, 0.0, 0.05);
        c.scheme = SchemeKind::BoConservationLaw;
        assert!(matches!(run(&c), Err(Error::Cfl { .. })));
        // the model scheme only warns
        c.scheme = SchemeKind::ModelFullyDiscrete;
        c.t_end = 0.05;
        assert!(run(&c).is_ok());
    }

    #[test]
    fn blow_up_reports_step() {
        // far beyond the dispersive stability limit
        let c = exp_config(400, Dispersion::Abs, 5e-2, 1e-3);
        match run(&c) {
            Err(Error::BlowUp { step, .. }) => assert!(step > 0),
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn suggested_step_admits_published_steps() {
        let c = exp_config(400, Dispersion::Abs, 5e-4, 1.0);
        assert!(suggest_dt(&c).unwrap() >= 2e-5);
        let c = exp_config(200, Dispersion::Abs, 1e-5, 1.0);
        assert!(suggest_dt(&c).unwrap() >= 1e-4);
    }

    #[test]
    fn suggested_step_without_dispersion_is_transport_cfl() {
        let c = exp_config(400, Dispersion::Abs, 0.0, 1.0);
        let dt = suggest_dt(&c).unwrap();
        assert!((dt - 0.5 * 0.005).abs() < 1e-15, "{dt}");
    }

    #[test]
    fn suggested_step_limits_antidiffusion_on_riemann_data() {
        let mut c = exp_config(100, Dispersion::Abs, 1e-5, 1.0);
        c.profile = InitialProfile::riemann_with_origin(1.0, -1.0);
        c.grid.origin_node = true;
        let dt = suggest_dt(&c).unwrap();
        assert!((dt - 0.5 * (8.0f64 * 1e-5 * 0.02).sqrt()).abs() < 1e-15, "{dt}");
        let traj = run(&RunConfig { dt, ..c }).unwrap();
        assert!(traj.last().max() < 2.0);
    }

    #[test]
    fn steady_run_stops_early_on_constant_data() {
        let mut c = exp_config(100, Dispersion::Square, 1e-5, 1e-3);
        c.profile = InitialProfile::CustomSamples { values: vec![0.25; 101] };
        let traj = run_to_steady(&c, 1e-8).unwrap();
        assert_eq!(traj.steps, 1);
        assert_eq!(traj.steady_at, Some(1e-3));
    }
}
