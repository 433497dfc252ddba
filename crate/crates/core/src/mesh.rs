//! Uniform 1-D grids, state fields, initial profiles and the discrete calculus
//! shared by all schemes.
//!
//! Grids are node-centered: node `i` sits at `x_min + i * dx` and both end
//! points carry a node. Stencils reach two neighbors on each side, so ghost
//! values beyond the ends are supplied by a [`BoundaryRule`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

/// Smallest grid that still fits the widest (five-point) stencil.
pub const MIN_POINTS: usize = 5;

/// Serializable description of a grid, resolved by [`GridSpec::build`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec<T> {
    pub x_min: T,
    pub x_max: T,
    pub n_points: usize,
    #[serde(default)]
    pub origin_node: bool,
}

impl<T: Real> GridSpec<T> {
    /// `intervals` uniform intervals on `[-1, 1]`.
    pub fn symmetric_unit(intervals: usize, origin_node: bool) -> Self {
        GridSpec {
            x_min: -T::one(),
            x_max: T::one(),
            n_points: intervals + 1,
            origin_node,
        }
    }

    pub fn build(&self) -> Result<Grid1D<T>> {
        make_grid(self.x_min, self.x_max, self.n_points, self.origin_node)
    }
}

/// Uniform node-centered mesh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid1D<T> {
    x_min: T,
    x_max: T,
    n_points: usize,
    dx: T,
    origin_index: Option<usize>,
}

/// Builds a uniform grid on `[x_min, x_max]`.
///
/// With `origin_node` set, the number of intervals is increased (to the next
/// even count on a symmetric domain) until a node lands on `x = 0`; that node
/// reports the coordinate `0` exactly.
pub fn make_grid<T: Real>(x_min: T, x_max: T, n_points: usize, origin_node: bool) -> Result<Grid1D<T>> {
    if !(x_min.is_finite() && x_max.is_finite()) || x_min >= x_max {
        return Err(Error::config(format!("empty domain [{x_min}, {x_max}]")));
    }
    if n_points < MIN_POINTS {
        return Err(Error::config(format!(
            "{n_points} grid points given, at least {MIN_POINTS} required"
        )));
    }
    let length = x_max - x_min;
    if !origin_node {
        return Ok(Grid1D {
            x_min,
            x_max,
            n_points,
            dx: length / T::count(n_points - 1),
            origin_index: None,
        });
    }
    if !(x_min < T::zero() && T::zero() < x_max) {
        return Err(Error::config(format!(
            "origin node requested but 0 is not inside ({x_min}, {x_max})"
        )));
    }
    let requested = n_points - 1;
    for intervals in requested..=4 * requested {
        let position = -x_min / length * T::count(intervals);
        let k = position.round();
        if (position - k).abs() <= T::lit(1e-9) {
            let dx = length / T::count(intervals);
            let k = k.to_usize().expect("origin index is a nonnegative integer");
            let x_k = x_min + T::count(k) * dx;
            if x_k.abs() > dx * T::lit(1e-12) {
                continue;
            }
            return Ok(Grid1D {
                x_min,
                x_max,
                n_points: intervals + 1,
                dx,
                origin_index: Some(k),
            });
        }
    }
    Err(Error::config(format!(
        "no interval count in [{requested}, {}] places a node at the origin of [{x_min}, {x_max}]",
        4 * requested
    )))
}

impl<T: Real> Grid1D<T> {
    pub fn x_min(&self) -> T {
        self.x_min
    }

    pub fn x_max(&self) -> T {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn intervals(&self) -> usize {
        self.n_points - 1
    }

    pub fn dx(&self) -> T {
        self.dx
    }

    pub fn origin_node(&self) -> bool {
        self.origin_index.is_some()
    }

    pub fn origin_index(&self) -> Option<usize> {
        self.origin_index
    }

    pub fn x(&self, i: usize) -> T {
        if Some(i) == self.origin_index {
            T::zero()
        } else if i + 1 == self.n_points {
            self.x_max
        } else {
            self.x_min + T::count(i) * self.dx
        }
    }

    pub fn nodes(&self) -> Vec<T> {
        (0..self.n_points).map(|i| self.x(i)).collect()
    }

    pub fn spec(&self) -> GridSpec<T> {
        GridSpec {
            x_min: self.x_min,
            x_max: self.x_max,
            n_points: self.n_points,
            origin_node: self.origin_node(),
        }
    }

    /// Same domain, `factor` times as many intervals.
    pub fn refined(&self, factor: usize) -> Result<Grid1D<T>> {
        make_grid(
            self.x_min,
            self.x_max,
            factor * self.intervals() + 1,
            self.origin_node(),
        )
    }
}

/// Treatment of ghost nodes beyond the ends of the grid.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryRule {
    /// Ghost nodes hold the boundary value.
    #[default]
    ConstantExtension,
    /// The end nodes are the same physical point; the period is `x_max - x_min`
    /// and the distinct unknowns are nodes `0..n-1`.
    Periodic,
}

impl BoundaryRule {
    /// Maps a possibly out-of-range node index onto the grid.
    #[inline]
    pub fn resolve(self, j: isize, n: usize) -> usize {
        match self {
            BoundaryRule::ConstantExtension => j.clamp(0, n as isize - 1) as usize,
            BoundaryRule::Periodic => j.rem_euclid(n as isize - 1) as usize,
        }
    }

    /// Number of physically distinct nodes.
    pub fn distinct_nodes(self, n: usize) -> usize {
        match self {
            BoundaryRule::ConstantExtension => n,
            BoundaryRule::Periodic => n - 1,
        }
    }

    /// Checks that data sampled on a grid are compatible with this rule.
    pub fn check<T: Real>(self, u: &[T]) -> Result<()> {
        if let BoundaryRule::Periodic = self {
            let (first, last) = (u[0], u[u.len() - 1]);
            let scale = u.iter().fold(T::one(), |m, v| m.max(v.abs()));
            if (first - last).abs() > T::lit(1e-12) * scale {
                return Err(Error::config(format!(
                    "periodic boundary requires u(x_min) = u(x_max), got {first} and {last}"
                )));
            }
        }
        Ok(())
    }
}

/// Copies `u` into `out` with `ghosts` extra nodes on each side.
pub fn fill_extended<T: Real>(u: &[T], rule: BoundaryRule, ghosts: usize, out: &mut Vec<T>) {
    let n = u.len();
    out.clear();
    out.reserve(n + 2 * ghosts);
    let g = ghosts as isize;
    for j in -g..(n as isize + g) {
        out.push(u[rule.resolve(j, n)]);
    }
}

/// Solution values at one time level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateField<T> {
    pub grid: Grid1D<T>,
    pub u: Vec<T>,
    pub t: T,
}

impl<T: Real> StateField<T> {
    pub fn new(grid: Grid1D<T>, u: Vec<T>, t: T) -> Result<Self> {
        if u.len() != grid.n_points() {
            return Err(Error::config(format!(
                "state has {} values for a grid of {} points",
                u.len(),
                grid.n_points()
            )));
        }
        if let Some(i) = u.iter().position(|v| !v.is_finite()) {
            return Err(Error::BlowUp {
                step: 0,
                node: i,
                x: grid.x(i).as_f64(),
                time: t.as_f64(),
            });
        }
        Ok(StateField { grid, u, t })
    }

    pub fn from_fn(grid: Grid1D<T>, t: T, f: impl Fn(T) -> T) -> Result<Self> {
        let u = (0..grid.n_points()).map(|i| f(grid.x(i))).collect();
        Self::new(grid, u, t)
    }

    pub fn dx(&self) -> T {
        self.grid.dx()
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn min(&self) -> T {
        self.u.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max(&self) -> T {
        self.u.iter().copied().fold(T::neg_infinity(), T::max)
    }

    /// `dx * sum(u)` over the distinct nodes of the rule.
    pub fn mass(&self, rule: BoundaryRule) -> T {
        let m = rule.distinct_nodes(self.len());
        self.u[..m].iter().copied().sum::<T>() * self.dx()
    }

    pub fn second_difference(&self, rule: BoundaryRule) -> Vec<T> {
        second_difference(&self.u, self.dx(), rule)
    }

    pub fn forward_slope_max(&self) -> T {
        forward_slope_max(&self.u, self.dx())
    }
}

/// Initial data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialProfile<T> {
    /// `amplitude * exp(-rate * x^2)`.
    Exponential { amplitude: T, rate: T },
    /// `left` for `x < 0`, `right` for `x > 0` and exactly `0` at the origin
    /// node, which the grid must carry.
    RiemannWithOrigin { left: T, right: T },
    /// `left` for `x < 0`, `right` for `x >= 0`; no zero datum.
    RiemannPlain { left: T, right: T },
    /// Node values given directly.
    CustomSamples { values: Vec<T> },
}

impl<T: Real> InitialProfile<T> {
    /// `exp(-100 x^2)`.
    pub fn exponential() -> Self {
        InitialProfile::Exponential {
            amplitude: T::one(),
            rate: T::lit(100.0),
        }
    }

    pub fn riemann_with_origin(left: T, right: T) -> Self {
        InitialProfile::RiemannWithOrigin { left, right }
    }

    pub fn riemann_plain(left: T, right: T) -> Self {
        InitialProfile::RiemannPlain { left, right }
    }

    /// Left and right far-field states of Riemann data.
    pub fn riemann_states(&self) -> Option<(T, T)> {
        match *self {
            InitialProfile::RiemannWithOrigin { left, right }
            | InitialProfile::RiemannPlain { left, right } => Some((left, right)),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some((left, right)) = self.riemann_states() {
            if !(left >= right) {
                return Err(Error::config(format!(
                    "Riemann data must satisfy left >= right, got {left} < {right}"
                )));
            }
        }
        if let InitialProfile::Exponential { amplitude, rate } = self {
            if !(amplitude.is_finite() && rate.is_finite() && *rate >= T::zero()) {
                return Err(Error::config("exponential profile needs finite amplitude and rate >= 0"));
            }
        }
        Ok(())
    }
}

/// Samples an initial profile on a grid at `t = 0`.
pub fn sample_profile<T: Real>(profile: &InitialProfile<T>, grid: &Grid1D<T>) -> Result<StateField<T>> {
    profile.validate()?;
    match profile {
        InitialProfile::Exponential { amplitude, rate } => {
            StateField::from_fn(*grid, T::zero(), |x| *amplitude * (-*rate * x * x).exp())
        }
        InitialProfile::RiemannWithOrigin { left, right } => {
            let origin = grid.origin_index().ok_or_else(|| {
                Error::config("riemann_with_origin needs a grid with an origin node")
            })?;
            let u = (0..grid.n_points())
                .map(|i| match i.cmp(&origin) {
                    std::cmp::Ordering::Less => *left,
                    std::cmp::Ordering::Equal => T::zero(),
                    std::cmp::Ordering::Greater => *right,
                })
                .collect();
            StateField::new(*grid, u, T::zero())
        }
        InitialProfile::RiemannPlain { left, right } => {
            StateField::from_fn(*grid, T::zero(), |x| if x < T::zero() { *left } else { *right })
        }
        InitialProfile::CustomSamples { values } => StateField::new(*grid, values.clone(), T::zero()),
    }
}

/// `w_i = (u_{i-1} - 2 u_i + u_{i+1}) / dx^2` with ghost values per `rule`.
pub fn second_difference<T: Real>(u: &[T], dx: T, rule: BoundaryRule) -> Vec<T> {
    let n = u.len();
    let inv = (dx * dx).recip();
    let two = T::lit(2.0);
    (0..n)
        .map(|i| {
            let left = u[rule.resolve(i as isize - 1, n)];
            let right = u[rule.resolve(i as isize + 1, n)];
            (left - two * u[i] + right) * inv
        })
        .collect()
}

/// Discrete one-sided Lipschitz seminorm `max_i ((u_{i+1} - u_i) / dx)_+`.
pub fn forward_slope_max<T: Real>(u: &[T], dx: T) -> T {
    u.windows(2)
        .map(|p| (p[1] - p[0]) / dx)
        .fold(T::zero(), T::max)
}

/// Linear interpolation of node data `(xs, ys)` at `x`, clamped to the end values.
pub fn interpolate_linear<T: Real>(xs: &[T], ys: &[T], x: T) -> T {
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let k = xs.partition_point(|&v| v <= x).saturating_sub(1).min(n - 2);
    let theta = (x - xs[k]) / (xs[k + 1] - xs[k]);
    ys[k] + theta * (ys[k + 1] - ys[k])
}
