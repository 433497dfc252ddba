//! Transport and dispersion fluxes and the numerical flux formulas built on them.

use serde::{Deserialize, Serialize};

use crate::mesh::{fill_extended, BoundaryRule};
use crate::real::Real;

/// Convex transport flux `f`.
pub trait ConvexFlux<T: Real> {
    fn eval(&self, u: T) -> T;
    fn derivative(&self, u: T) -> T;
    /// Lower bound on `f''`.
    fn alpha(&self) -> T;
    /// The point where `f'` vanishes, if `f` has one.
    fn sonic_point(&self) -> Option<T>;
}

/// Even concave dispersion flux `g` with `g(0) = 0`.
pub trait DispersionFlux<T: Real> {
    fn eval(&self, s: T) -> T;
    fn derivative(&self, s: T) -> T;
    fn second_derivative(&self, s: T) -> T;
}

/// The transport fluxes available to run configurations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Transport<T> {
    /// `f(u) = u^2 / 2`.
    Burgers,
    /// `f(u) = speed * u`. Convex but not strictly; `alpha = 0`.
    Linear { speed: T },
}

impl<T: Real> ConvexFlux<T> for Transport<T> {
    #[inline]
    fn eval(&self, u: T) -> T {
        match *self {
            Transport::Burgers => T::lit(0.5) * u * u,
            Transport::Linear { speed } => speed * u,
        }
    }

    #[inline]
    fn derivative(&self, u: T) -> T {
        match *self {
            Transport::Burgers => u,
            Transport::Linear { speed } => speed,
        }
    }

    fn alpha(&self) -> T {
        match self {
            Transport::Burgers => T::one(),
            Transport::Linear { .. } => T::zero(),
        }
    }

    fn sonic_point(&self) -> Option<T> {
        match self {
            Transport::Burgers => Some(T::zero()),
            Transport::Linear { .. } => None,
        }
    }
}

/// The dispersion fluxes available to run configurations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Dispersion<T> {
    /// `g(s) = -|s|`, with `g'(0)` taken as 0.
    Abs,
    /// `g(s) = -s^2`.
    Square,
    /// `g(s) = -|s|^exponent` for `exponent >= 1`.
    Power { exponent: T },
}

impl<T: Real> Dispersion<T> {
    pub fn validate(&self) -> crate::Result<()> {
        if let Dispersion::Power { exponent } = *self {
            if !(exponent >= T::one()) {
                return Err(crate::Error::Config(format!(
                    "power dispersion needs exponent >= 1 to stay concave, got {exponent}"
                )));
            }
        }
        Ok(())
    }
}

impl<T: Real> DispersionFlux<T> for Dispersion<T> {
    #[inline]
    fn eval(&self, s: T) -> T {
        match *self {
            Dispersion::Abs => -s.abs(),
            Dispersion::Square => -s * s,
            Dispersion::Power { exponent } => -s.abs().powf(exponent),
        }
    }

    fn derivative(&self, s: T) -> T {
        match *self {
            Dispersion::Abs => -s.sgn(),
            Dispersion::Square => T::lit(-2.0) * s,
            Dispersion::Power { exponent } => -exponent * s.abs().powf(exponent - T::one()) * s.sgn(),
        }
    }

    fn second_derivative(&self, s: T) -> T {
        match *self {
            Dispersion::Abs => T::zero(),
            Dispersion::Square => T::lit(-2.0),
            Dispersion::Power { exponent } => {
                if exponent == T::one() {
                    T::zero()
                } else {
                    -exponent * (exponent - T::one()) * s.abs().powf(exponent - T::lit(2.0))
                }
            }
        }
    }
}

/// Godunov flux of a convex `f` for the states `(a, b)`.
///
/// For `a <= b` this is the minimum of `f` over `[a, b]`, for `a > b` the
/// maximum of the endpoint values.
#[inline]
pub fn godunov_flux<T: Real, F: ConvexFlux<T> + ?Sized>(a: T, b: T, f: &F) -> T {
    if a <= b {
        match f.sonic_point() {
            Some(s) if a <= s && s <= b => f.eval(s),
            _ => f.eval(a).min(f.eval(b)),
        }
    } else {
        f.eval(a).max(f.eval(b))
    }
}

/// Engquist-Osher flux `g(max(0, b)) + g(min(0, a))`.
#[inline]
pub fn engquist_osher_flux<T: Real, G: DispersionFlux<T> + ?Sized>(a: T, b: T, g: &G) -> T {
    g.eval(b.pos()) + g.eval(a.neg_part())
}

/// Limited slopes `s_i = max(u_{i+1} - u_i, u_i - u_{i-1}) / dx`.
pub fn bo_slopes<T: Real>(u: &[T], dx: T, rule: BoundaryRule) -> Vec<T> {
    let mut ext = Vec::new();
    fill_extended(u, rule, 1, &mut ext);
    ext.windows(3)
        .map(|p| (p[2] - p[1]).max(p[1] - p[0]) / dx)
        .collect()
}

/// Interface fluxes `f_{i+1/2}` of the Brenier-Osher scheme for
/// `i = -1, 0, ..., n-1` (so `n + 1` values, the first one on the left boundary).
///
/// The edge states `u_i +- (dx/2) s_i` only involve the undivided differences,
/// so no spacing is needed.
pub fn bo_interface_flux<T: Real, F: ConvexFlux<T> + ?Sized>(u: &[T], f: &F, rule: BoundaryRule) -> Vec<T> {
    let mut ext = Vec::new();
    let mut out = Vec::new();
    bo_interface_flux_into(u, f, rule, &mut ext, &mut out);
    out
}

pub(crate) fn bo_interface_flux_into<T: Real, F: ConvexFlux<T> + ?Sized>(
    u: &[T],
    f: &F,
    rule: BoundaryRule,
    ext: &mut Vec<T>,
    out: &mut Vec<T>,
) {
    fill_extended(u, rule, 2, ext);
    let half = T::lit(0.5);
    // ext[j] holds node j - 2; slope (times dx) at ext index j, for j = 1..=n+2
    let slope = |j: usize| (ext[j + 1] - ext[j]).max(ext[j] - ext[j - 1]);
    out.clear();
    out.extend((1..=u.len() + 1).map(|j| {
        let left = ext[j] + half * slope(j);
        let right = ext[j + 1] - half * slope(j + 1);
        godunov_flux(left, right, f)
    }));
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const B: Transport<f64> = Transport::Burgers;

    #[test]
    fn godunov_closed_forms() {
        assert_eq!(godunov_flux(-1.0, 1.0, &B), 0.0);
        assert_eq!(godunov_flux(1.0, -1.0, &B), 0.5);
        assert_eq!(godunov_flux(1.0, 2.0, &B), 0.5);
        assert_eq!(godunov_flux(-2.0, -1.0, &B), 0.5);
        assert_eq!(godunov_flux(0.3, 0.3, &B), 0.045);
        let lin = Transport::Linear { speed: -2.0 };
        assert_eq!(godunov_flux(1.0, 3.0, &lin), -6.0);
        assert_eq!(godunov_flux(3.0, 1.0, &lin), -2.0);
    }

    #[test]
    fn engquist_osher_closed_forms() {
        let abs = Dispersion::Abs;
        assert_eq!(engquist_osher_flux(3.0, -2.0, &abs), 0.0);
        assert_eq!(engquist_osher_flux(-3.0, 2.0, &abs), -5.0);
        assert_eq!(engquist_osher_flux(-1.0, 2.0, &Dispersion::Square), -5.0);
    }

    #[test]
    fn dispersion_derivatives() {
        let sq = Dispersion::Square;
        assert_eq!(sq.derivative(3.0), -6.0);
        assert_eq!(sq.second_derivative(3.0), -2.0);
        assert_eq!(Dispersion::<f64>::Abs.derivative(0.0), 0.0);
        assert_eq!(Dispersion::<f64>::Abs.derivative(-2.0), 1.0);
        let p = Dispersion::Power { exponent: 2.0 };
        assert_abs_diff_eq!(p.eval(-3.0), sq.eval(-3.0));
        assert_abs_diff_eq!(p.derivative(-3.0), sq.derivative(-3.0));
        assert_abs_diff_eq!(p.second_derivative(-3.0), sq.second_derivative(-3.0));
        assert!(Dispersion::Power { exponent: 0.5 }.validate().is_err());
    }

    #[test]
    fn slope_examples() {
        assert_eq!(bo_slopes(&[0.0, 1.0, 3.0], 1.0, BoundaryRule::ConstantExtension)[1], 2.0);
        assert_eq!(bo_slopes(&[3.0, 1.0, 0.0], 1.0, BoundaryRule::ConstantExtension)[1], -1.0);
        assert!(bo_slopes(&[2.0; 6], 0.1, BoundaryRule::Periodic).iter().all(|&s| s == 0.0));
    }

    #[test]
    fn interface_flux_of_constant_and_step() {
        let f = bo_interface_flux(&[0.7; 6], &B, BoundaryRule::ConstantExtension);
        assert_eq!(f.len(), 7);
        assert!(f.iter().all(|&v| v == B.eval(0.7)));

        // hand evaluation: s_1 = max(-2, 0) = 0, s_2 = max(0, -2) = 0, so h(1, -1) = 1/2
        let f = bo_interface_flux(&[1.0, 1.0, -1.0, -1.0], &B, BoundaryRule::ConstantExtension);
        assert_eq!(f[2], 0.5);
    }

    #[test]
    fn interface_flux_on_linear_data_meets_at_midpoint() {
        let dx = 0.05;
        let xs: Vec<f64> = (0..21).map(|i| -0.5 + i as f64 * dx).collect();
        let f = bo_interface_flux(&xs, &B, BoundaryRule::ConstantExtension);
        for i in 1..20 {
            let mid = 0.5 * (xs[i] + xs[i + 1]);
            // direct evaluation of h at the reconstructed (equal) edge states
            assert_abs_diff_eq!(f[i + 1], 0.5 * mid * mid, epsilon = 1e-14);
        }
    }
}
