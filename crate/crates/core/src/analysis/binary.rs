//! Binary oscillations `u_i = v_i + (-1)^i w_i`: decomposition, the steady
//! envelope, and the two-phase continuum system for `(v, w)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux::DispersionFlux;
use crate::mesh::{Grid1D, StateField};
use crate::real::Real;

/// Which node index carries the `+` sign of `(-1)^i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    /// Node 0 is even: `u_0 = v_0 + w_0`.
    #[default]
    EvenAtZero,
    /// Node 0 is odd: `u_0 = v_0 - w_0`.
    OddAtZero,
}

impl Parity {
    #[inline]
    pub fn sign<T: Real>(self, i: usize) -> T {
        let even = (i % 2 == 0) == (self == Parity::EvenAtZero);
        if even {
            T::one()
        } else {
            -T::one()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillationDecomposition<T> {
    pub v: Vec<T>,
    pub w: Vec<T>,
    pub parity: Parity,
    /// Rounding correction, nonzero only at nodes where no floating-point
    /// pair `(v_i, w_i)` sums to `u_i`; at most one ulp of `v_i`.
    pub residual: Vec<T>,
}

impl<T: Real> OscillationDecomposition<T> {
    /// A decomposition with zero residual.
    pub fn new(v: Vec<T>, w: Vec<T>, parity: Parity) -> Self {
        let residual = vec![T::zero(); v.len()];
        OscillationDecomposition { v, w, parity, residual }
    }

    /// `(v_i + (-1)^i w_i) + r_i`.
    pub fn reconstruct(&self) -> Vec<T> {
        (0..self.v.len())
            .map(|i| (self.v[i] + self.parity.sign::<T>(i) * self.w[i]) + self.residual[i])
            .collect()
    }

    pub fn max_abs_w(&self) -> T {
        self.w.iter().fold(T::zero(), |m, w| m.max(w.abs()))
    }
}

/// Splits `u` into the smooth part `v_i = (u_i + ubar_i) / 2`, with `ubar_i`
/// the average of the two neighbors (one-sided at the ends), and the
/// oscillation amplitude `w`.
///
/// Reconstruction is exact: `v_i` is nudged so that `v_i + (u_i - v_i)`
/// rounds back to `u_i`, and where no nudge works the leftover rounding goes
/// to `residual` so that `w` keeps its natural value.
pub fn decompose_binary<T: Real>(state: &StateField<T>, parity: Parity) -> OscillationDecomposition<T> {
    decompose_slice(&state.u, parity)
}

pub fn decompose_slice<T: Real>(u: &[T], parity: Parity) -> OscillationDecomposition<T> {
    let n = u.len();
    let half = T::lit(0.5);
    let mut v = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    let mut residual = Vec::with_capacity(n);
    for i in 0..n {
        let ubar = match (i.checked_sub(1).map(|j| u[j]), u.get(i + 1).copied()) {
            (Some(a), Some(b)) => half * (a + b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => u[i],
        };
        let (vi, di, ri) = exact_split(u[i], half * (u[i] + ubar));
        v.push(vi);
        w.push(parity.sign::<T>(i) * di);
        residual.push(ri);
    }
    OscillationDecomposition { v, w, parity, residual }
}

/// Returns `(v, d, r)` with `(v + d) + r == u` exactly, `v` close to `guess`
/// and `r` zero whenever some nudge of `v` makes `v + d == u`.
///
/// When `|u|` is much smaller than `|v|` the sum `v + d` lives on a coarser
/// lattice than `u` and no such nudge exists; `r = u - (v + d)` is then exact
/// because `v + d` is within one rounding of `u`.
fn exact_split<T: Real>(u: T, guess: T) -> (T, T, T) {
    let mut v = guess;
    for _ in 0..4 {
        let d = u - v;
        if v + d == u {
            return (v, d, T::zero());
        }
        v = u - d;
    }
    let d = u - guess;
    let r = u - (guess + d);
    if (guess + d) + r == u {
        (guess, d, r)
    } else {
        (u, T::zero(), T::zero())
    }
}

/// `alpha = v_xx + 4 w / dx^2`, `beta = v_xx - 4 w / dx^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaBeta<T> {
    pub alpha: T,
    pub beta: T,
}

impl<T: Real> AlphaBeta<T> {
    pub fn new(v_xx: T, w: T, dx: T) -> Self {
        let s = T::lit(4.0) * w / (dx * dx);
        AlphaBeta { alpha: v_xx + s, beta: v_xx - s }
    }

    /// `sgn(alpha) g(alpha) - sgn(beta) g(beta)`.
    pub fn source<G: DispersionFlux<T> + ?Sized>(&self, g: &G) -> T {
        self.alpha.sgn() * g.eval(self.alpha) - self.beta.sgn() * g.eval(self.beta)
    }
}

/// Decay rate and amplitude of the steady binary oscillations around a
/// stationary shock between `left` and `right`.
///
/// For `x >= 0` the envelope curves are `right +- c_hat e^(-c x)`, for `x < 0`
/// they are `left +- c_hat e^(c x)`: the oscillations decay away from the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopePrediction<T> {
    /// `8 delta / dx^3`.
    pub c: T,
    pub c_hat: T,
    pub left: T,
    pub right: T,
}

/// Envelope for states `+-jump/2` with `c_hat = jump / 2`.
pub fn envelope_prediction<T: Real>(delta: T, dx: T, jump: T) -> Result<EnvelopePrediction<T>> {
    let half = T::lit(0.5) * jump;
    EnvelopePrediction::new(delta, dx, half, -half)
}

impl<T: Real> EnvelopePrediction<T> {
    pub fn new(delta: T, dx: T, left: T, right: T) -> Result<Self> {
        if !(dx > T::zero()) || !(delta >= T::zero()) {
            return Err(Error::Precondition(format!(
                "envelope needs dx > 0 and delta >= 0, got dx = {dx}, delta = {delta}"
            )));
        }
        Ok(EnvelopePrediction {
            c: T::lit(8.0) * delta / (dx * dx * dx),
            c_hat: T::lit(0.5) * (left - right).abs(),
            left,
            right,
        })
    }

    /// Predicted `|w|` at `x`.
    pub fn amplitude(&self, x: T) -> T {
        self.c_hat * (-self.c * x.abs()).exp()
    }

    /// The constant state the oscillations sit on at `x`.
    pub fn state(&self, x: T) -> T {
        if x < T::zero() {
            self.left
        } else {
            self.right
        }
    }

    /// Lower and upper envelope curves at `x`.
    pub fn bounds(&self, x: T) -> (T, T) {
        let s = self.state(x);
        let a = self.amplitude(x);
        (s - a, s + a)
    }

    /// Fraction of nodes whose value lies within the envelope widened by `slack`.
    pub fn fraction_inside(&self, state: &StateField<T>, slack: T) -> T {
        let inside = state
            .u
            .iter()
            .enumerate()
            .filter(|&(i, &u)| {
                let (lo, hi) = self.bounds(state.grid.x(i));
                u >= lo - slack && u <= hi + slack
            })
            .count();
        T::count(inside) / T::count(state.len().max(1))
    }

    /// Fraction of nodes not beyond the outer envelope curve widened by `slack`:
    /// `u <= left + amplitude` for `x < 0` and `u >= right - amplitude` for `x >= 0`.
    ///
    /// Unlike [`fraction_inside`](Self::fraction_inside) this ignores the
    /// smeared mean state across the shock.
    pub fn fraction_inside_outer(&self, state: &StateField<T>, slack: T) -> T {
        let inside = state
            .u
            .iter()
            .enumerate()
            .filter(|&(i, &u)| {
                let x = state.grid.x(i);
                let a = self.amplitude(x) + slack;
                if x < T::zero() {
                    u <= self.left + a
                } else {
                    u >= self.right - a
                }
            })
            .count();
        T::count(inside) / T::count(state.len().max(1))
    }
}

/// Settings of [`fit_envelope_rate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeFitOptions<T> {
    /// Absolute floor on `|w|`.
    pub noise_floor: T,
    /// Floor relative to the largest `|w|` on each side; keeps the fit off the
    /// leading edge of the oscillation region, which decays faster than the
    /// steady envelope.
    pub relative_floor: T,
    /// Minimum number of nodes per side.
    pub min_nodes: usize,
}

impl<T: Real> Default for EnvelopeFitOptions<T> {
    fn default() -> Self {
        EnvelopeFitOptions { noise_floor: T::lit(1e-6), relative_floor: T::lit(1e-2), min_nodes: 10 }
    }
}

/// Per-side fitted decay rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeFit<T> {
    pub left: Option<T>,
    pub right: Option<T>,
    /// Mean of the available side rates.
    pub rate: T,
}

/// Magnitude of the decay rate of `|w|` away from the origin, from a least
/// squares fit of `log|w_i|` against `|x_i|` on each side.
pub fn fit_envelope_rate<T: Real>(decomposition: &OscillationDecomposition<T>, grid: &Grid1D<T>) -> Result<T> {
    fit_envelope(decomposition, grid, EnvelopeFitOptions::default()).map(|f| f.rate)
}

/// On each side, the fit uses the first contiguous run of nodes (walking away
/// from the origin) where `|w|` exceeds the floors.
pub fn fit_envelope<T: Real>(
    decomposition: &OscillationDecomposition<T>,
    grid: &Grid1D<T>,
    options: EnvelopeFitOptions<T>,
) -> Result<EnvelopeFit<T>> {
    let w = &decomposition.w;
    if w.len() != grid.n_points() {
        return Err(Error::Alignment(format!(
            "decomposition has {} nodes, grid has {}",
            w.len(),
            grid.n_points()
        )));
    }
    let n = w.len();
    let right: Vec<usize> = (0..n).filter(|&i| grid.x(i) > T::zero()).collect();
    let left: Vec<usize> = (0..n).rev().filter(|&i| grid.x(i) < T::zero()).collect();
    let fit_side = |side: &[usize]| -> Option<T> {
        let peak = side.iter().fold(T::zero(), |m, &i| m.max(w[i].abs()));
        let floor = options.noise_floor.max(options.relative_floor * peak);
        let run: Vec<usize> = side
            .iter()
            .copied()
            .skip_while(|&i| w[i].abs() < floor)
            .take_while(|&i| w[i].abs() >= floor)
            .collect();
        if run.len() < options.min_nodes {
            return None;
        }
        let pts: Vec<(T, T)> = run.iter().map(|&i| (grid.x(i).abs(), w[i].abs().ln())).collect();
        Some(least_squares_slope(&pts).abs())
    };
    let l = fit_side(&left);
    let r = fit_side(&right);
    let rates: Vec<T> = [l, r].into_iter().flatten().collect();
    if rates.is_empty() {
        return Err(Error::InsufficientData(format!(
            "fewer than {} nodes with |w| above the noise floor on either side of the origin",
            options.min_nodes
        )));
    }
    let rate = rates.iter().copied().sum::<T>() / T::count(rates.len());
    Ok(EnvelopeFit { left: l, right: r, rate })
}

/// Slope of the least squares line through `pts`.
pub(crate) fn least_squares_slope<T: Real>(pts: &[(T, T)]) -> T {
    let m = T::count(pts.len());
    let mx = pts.iter().map(|p| p.0).sum::<T>() / m;
    let my = pts.iter().map(|p| p.1).sum::<T>() / m;
    let sxy: T = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: T = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Pointwise two-phase system: `v_t = -v v_x`,
/// `w_t = v w_x + (delta / dx) (sgn(alpha) g(alpha) - sgn(beta) g(beta))`.
#[allow(clippy::too_many_arguments)]
pub fn two_phase_point<T: Real, G: DispersionFlux<T> + ?Sized>(
    v: T,
    v_x: T,
    v_xx: T,
    w: T,
    w_x: T,
    delta: T,
    dx: T,
    g: &G,
) -> (T, T) {
    let s = AlphaBeta::new(v_xx, w, dx).source(g);
    (-v * v_x, v * w_x + delta / dx * s)
}

/// The reduced system for `g = -|s|`: `v_t = -v v_x`, `w_t = v w_x - c w`
/// with `c = 8 delta / dx^3`.
pub fn two_phase_point_abs<T: Real>(v: T, v_x: T, w: T, w_x: T, delta: T, dx: T) -> (T, T) {
    let c = T::lit(8.0) * delta / (dx * dx * dx);
    (-v * v_x, v * w_x - c * w)
}

/// Two-phase right-hand side on grid arrays.
///
/// `v_x` is upwinded by the sign of `v` and `w_x` by the sign of `-v`, both to
/// second order where the two upstream nodes move the same way and first
/// order otherwise; `v_xx` is centered. Nodes fed by characteristics leaving a
/// shock (the upstream neighbor moves away) are inflow nodes: their `w` is
/// boundary data and is held fixed. Ends use constant extension.
pub fn two_phase_rhs<T: Real, G: DispersionFlux<T> + ?Sized>(
    v: &[T],
    w: &[T],
    delta: T,
    dx: T,
    g: &G,
) -> Result<(Vec<T>, Vec<T>)> {
    if v.len() != w.len() {
        return Err(Error::Alignment(format!("v has {} nodes, w has {}", v.len(), w.len())));
    }
    let n = v.len();
    let mut dv = vec![T::zero(); n];
    let mut dw = vec![T::zero(); n];
    for i in 0..n {
        let v_x = upwind_derivative(v, i, dx, |j| v[j]);
        let v_xx = centered_second(v, i, dx);
        let (w_x, inflow) = match upwind_derivative_checked(w, i, dx, |j| -v[j]) {
            Some(d) => (d, false),
            None => (T::zero(), true),
        };
        let (a, b) = two_phase_point(v[i], v_x, v_xx, w[i], w_x, delta, dx, g);
        dv[i] = a;
        dw[i] = if inflow { T::zero() } else { b };
    }
    Ok((dv, dw))
}

fn at<T: Real>(a: &[T], j: isize) -> T {
    a[j.clamp(0, a.len() as isize - 1) as usize]
}

fn centered_second<T: Real>(a: &[T], i: usize, dx: T) -> T {
    let i = i as isize;
    (at(a, i - 1) - T::lit(2.0) * at(a, i) + at(a, i + 1)) / (dx * dx)
}

/// Upwind derivative of `a` at node `i` for advection speed `speed(j)`, with
/// a first-order difference across points where the upstream characteristic
/// moves away.
fn upwind_derivative<T: Real>(a: &[T], i: usize, dx: T, speed: impl Fn(usize) -> T) -> T {
    let (d, _) = upwind(a, i, dx, speed);
    d
}

/// Like [`upwind_derivative`], but `None` at such points.
fn upwind_derivative_checked<T: Real>(a: &[T], i: usize, dx: T, speed: impl Fn(usize) -> T) -> Option<T> {
    match upwind(a, i, dx, speed) {
        (d, false) => Some(d),
        (_, true) => None,
    }
}

/// Returns the derivative and whether the upstream neighbor moves away from `i`.
fn upwind<T: Real>(a: &[T], i: usize, dx: T, speed: impl Fn(usize) -> T) -> (T, bool) {
    let n = a.len() as isize;
    let s = speed(i);
    if s == T::zero() {
        return (T::zero(), false);
    }
    let step: isize = if s > T::zero() { -1 } else { 1 };
    let sign = if step < 0 { T::one() } else { -T::one() };
    let ii = i as isize;
    let j1 = ii + step;
    if j1 < 0 || j1 >= n {
        return (T::zero(), false);
    }
    let first = sign * (a[i] - a[j1 as usize]) / dx;
    if speed(j1 as usize) * s <= T::zero() {
        return (first, true);
    }
    let j2 = ii + 2 * step;
    if j2 >= 0 && j2 < n && speed(j2 as usize) * s > T::zero() {
        let diff = T::lit(1.5) * a[i] - T::lit(2.0) * a[j1 as usize] + T::lit(0.5) * a[j2 as usize];
        (sign * diff / dx, false)
    } else {
        (first, false)
    }
}

/// History of `max|w|` from integrating the two-phase system.
#[derive(Debug, Clone, Serialize)]
pub struct TwoPhaseHistory<T> {
    pub times: Vec<T>,
    pub max_w: Vec<T>,
    pub final_state: OscillationDecomposition<T>,
}

/// Integrates the two-phase system from `start` over `duration` with the
/// classical four-stage Runge-Kutta method, recording `max|w|` every
/// `record_every` steps.
pub fn integrate_two_phase<T: Real, G: DispersionFlux<T> + ?Sized>(
    start: &OscillationDecomposition<T>,
    delta: T,
    dx: T,
    g: &G,
    duration: T,
    dt: T,
    record_every: usize,
) -> Result<TwoPhaseHistory<T>> {
    if !(dt > T::zero()) || !(duration >= T::zero()) {
        return Err(Error::Precondition(format!("need dt > 0 and duration >= 0, got {dt}, {duration}")));
    }
    let steps = (duration / dt).round().to_usize().unwrap_or(0);
    let record_every = record_every.max(1);
    let mut v = start.v.clone();
    let mut w = start.w.clone();
    let mut history = TwoPhaseHistory {
        times: vec![T::zero()],
        max_w: vec![start.max_abs_w()],
        final_state: start.clone(),
    };
    let axpy = |x: &[T], k: &[T], h: T| -> Vec<T> { x.iter().zip(k).map(|(&a, &b)| a + h * b).collect() };
    let half = T::lit(0.5) * dt;
    for step in 1..=steps {
        let (k1v, k1w) = two_phase_rhs(&v, &w, delta, dx, g)?;
        let (k2v, k2w) = two_phase_rhs(&axpy(&v, &k1v, half), &axpy(&w, &k1w, half), delta, dx, g)?;
        let (k3v, k3w) = two_phase_rhs(&axpy(&v, &k2v, half), &axpy(&w, &k2w, half), delta, dx, g)?;
        let (k4v, k4w) = two_phase_rhs(&axpy(&v, &k3v, dt), &axpy(&w, &k3w, dt), delta, dx, g)?;
        let sixth = dt / T::lit(6.0);
        for i in 0..v.len() {
            v[i] += sixth * (k1v[i] + T::lit(2.0) * (k2v[i] + k3v[i]) + k4v[i]);
            w[i] += sixth * (k1w[i] + T::lit(2.0) * (k2w[i] + k3w[i]) + k4w[i]);
        }
        if let Some(i) = v.iter().chain(&w).position(|x| !x.is_finite()) {
            return Err(Error::BlowUp {
                step,
                node: i % v.len(),
                x: f64::NAN,
                time: (T::count(step) * dt).as_f64(),
            });
        }
        if step % record_every == 0 || step == steps {
            history.times.push(T::count(step) * dt);
            history.max_w.push(w.iter().fold(T::zero(), |m, x| m.max(x.abs())));
        }
    }
    history.final_state = OscillationDecomposition::new(v, w, start.parity);
    Ok(history)
}
