//! Solvers and measurement tools for fully nonlinear KdV-type equations
//!
//! ```text
//! u_t + f(u)_x - delta * g(u_xx)_x = 0
//! ```
//!
//! with a convex transport flux `f` and an even concave dispersion flux `g`
//! (typically `g(s) = -|s|` or `g(s) = -s^2`).
//!
//! The crate is organized bottom-up:
//!
//! - [`mesh`]: uniform node-centered grids, state fields, initial profiles and
//!   the discrete calculus shared by every scheme.
//! - [`flux`]: the transport and dispersion fluxes together with the Godunov and
//!   Engquist-Osher numerical fluxes and the Brenier-Osher limited slopes.
//! - [`scheme`]: the forward-Euler scheme for the model equation, its
//!   method-of-lines right-hand side, the Brenier-Osher conservation-law
//!   scheme and the fine-grid entropy-solution reference.
//! - [`analysis`]: one-sided Lipschitz checks, traveling-wave profiles, binary
//!   oscillation decomposition and envelopes, modified-equation residuals and
//!   convergence metrics.
//!
//! All numerical code is generic over the scalar type through [`Real`]; the
//! `f64` aliases at the crate root cover the common case.

pub mod analysis;
pub mod error;
pub mod flux;
pub mod mesh;
pub mod real;
pub mod scheme;

pub use error::{Error, Result};
pub use real::Real;

pub use flux::{ConvexFlux, Dispersion, DispersionFlux, Transport};
pub use mesh::{BoundaryRule, Grid1D, GridSpec, InitialProfile, StateField};
pub use scheme::{RunConfig, SchemeKind, Trajectory};

/// Double-precision grid.
pub type Grid = mesh::Grid1D<f64>;
/// Double-precision state field.
pub type State = mesh::StateField<f64>;
/// Double-precision initial profile.
pub type Profile = mesh::InitialProfile<f64>;
/// Double-precision run configuration.
pub type Config = scheme::RunConfig<f64>;
/// Double-precision trajectory.
pub type Run = scheme::Trajectory<f64>;
/// Double-precision traveling-wave profile.
pub type TravelingWave = analysis::traveling::TravelingWaveProfile<f64>;
