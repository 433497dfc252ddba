//! Consistency of the semi-discrete operator with its modified equation.
//!
//! Applied to smooth `u`, the operator `L_h u` of the model scheme equals
//! `f(u)_x - delta g(u_xx)_x + D`, and for `u_xx` of one sign the discrepancy is
//! `D = -dx delta [sgn(u_xx) g'(u_xx) u_xxxx + sgn(u_xx) g''(u_xx) u_xxx^2] / 2 + O(dx^2)`.
//! The leading term comes from the upwind choice of the Engquist-Osher flux,
//! which evaluates `g` half a cell downwind of each interface.

use serde::Serialize;

use crate::analysis::binary::least_squares_slope;
use crate::error::{Error, Result};
use crate::flux::{engquist_osher_flux, ConvexFlux, DispersionFlux};
use crate::real::Real;

/// A function with analytic derivatives up to fourth order.
pub trait SmoothFunction<T> {
    /// The `order`-th derivative at `x` for `order` in `0..=4`.
    fn derivative(&self, order: usize, x: T) -> T;

    fn value(&self, x: T) -> T {
        self.derivative(0, x)
    }
}

/// `sum_k coeffs[k] x^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T> {
    pub coeffs: Vec<T>,
}

impl<T: Real> SmoothFunction<T> for Polynomial<T> {
    fn derivative(&self, order: usize, x: T) -> T {
        let mut acc = T::zero();
        for (k, &c) in self.coeffs.iter().enumerate().skip(order).rev() {
            // d^order/dx^order x^k = k!/(k-order)! x^(k-order)
            let falling: usize = (k - order + 1..=k).product();
            acc = acc * x + c * T::count(falling);
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModifiedEquationReport<T> {
    pub dx: Vec<T>,
    /// `max |D|` over the sample points, per `dx`.
    pub raw: Vec<T>,
    /// `max |D - predicted|` over the sample points, per `dx`.
    pub corrected: Vec<T>,
    /// Least squares slope of `log raw` against `log dx`.
    pub raw_order: T,
    pub corrected_order: T,
}

/// Number of evaluation points spread over the window.
pub const SAMPLE_POINTS: usize = 9;

/// Evaluates the discrepancy between the semi-discrete operator and the
/// target equation for `u` on `window`, for each `dx` in `dx_ladder`, and
/// fits convergence orders with and without the predicted leading term.
pub fn modified_equation_residual<T, U, F, G>(
    u: &U,
    f: &F,
    g: &G,
    delta: T,
    window: (T, T),
    dx_ladder: &[T],
) -> Result<ModifiedEquationReport<T>>
where
    T: Real,
    U: SmoothFunction<T> + ?Sized,
    F: ConvexFlux<T> + ?Sized,
    G: DispersionFlux<T> + ?Sized,
{
    let (a, b) = window;
    if !(b > a) || dx_ladder.len() < 2 || dx_ladder.iter().any(|&h| !(h > T::zero())) {
        return Err(Error::Precondition(
            "need a non-empty window and at least two positive spacings".into(),
        ));
    }
    // the stencil reaches two cells out; check the sign of u_xx there too
    let reach = dx_ladder.iter().fold(T::zero(), |m, &h| m.max(h)) * T::lit(2.5);
    let probes = 400;
    let mut sign = T::zero();
    for k in 0..=probes {
        let x = a - reach + (b - a + reach + reach) * T::count(k) / T::count(probes);
        let s = u.derivative(2, x).sgn();
        if s == T::zero() || (sign != T::zero() && s != sign) {
            return Err(Error::Precondition(format!("u_xx changes sign or vanishes near x = {x}")));
        }
        sign = s;
    }
    let points: Vec<T> = (0..SAMPLE_POINTS)
        .map(|k| a + (b - a) * T::count(k) / T::count(SAMPLE_POINTS - 1))
        .collect();
    let mut raw = Vec::new();
    let mut corrected = Vec::new();
    for &h in dx_ladder {
        let mut worst_raw = T::zero();
        let mut worst_corr = T::zero();
        for &x in &points {
            let d = discrete_operator(u, f, g, delta, x, h) - exact_operator(u, f, g, delta, x);
            let (u2, u3, u4) = (u.derivative(2, x), u.derivative(3, x), u.derivative(4, x));
            let predicted = -h * delta * T::lit(0.5) * sign * (g.derivative(u2) * u4 + g.second_derivative(u2) * u3 * u3);
            worst_raw = worst_raw.max(d.abs());
            worst_corr = worst_corr.max((d - predicted).abs());
        }
        raw.push(worst_raw);
        corrected.push(worst_corr);
    }
    let fit = |e: &[T]| {
        let pts: Vec<(T, T)> = dx_ladder.iter().zip(e).map(|(&h, &v)| (h.ln(), v.ln())).collect();
        least_squares_slope(&pts)
    };
    Ok(ModifiedEquationReport {
        raw_order: fit(&raw),
        corrected_order: fit(&corrected),
        dx: dx_ladder.to_vec(),
        raw,
        corrected,
    })
}

/// `f(u)_x - delta g'(u_xx) u_xxx`.
fn exact_operator<T, U, F, G>(u: &U, f: &F, g: &G, delta: T, x: T) -> T
where
    T: Real,
    U: SmoothFunction<T> + ?Sized,
    F: ConvexFlux<T> + ?Sized,
    G: DispersionFlux<T> + ?Sized,
{
    f.derivative(u.value(x)) * u.derivative(1, x) - delta * g.derivative(u.derivative(2, x)) * u.derivative(3, x)
}

/// The model operator `(F_{i+1/2} - F_{i-1/2}) / dx` at a node `x` with
/// `F_{i+1/2} = f((u_i + u_{i+1})/2) - delta g_EO(w_i, w_{i+1})`.
fn discrete_operator<T, U, F, G>(u: &U, f: &F, g: &G, delta: T, x: T, h: T) -> T
where
    T: Real,
    U: SmoothFunction<T> + ?Sized,
    F: ConvexFlux<T> + ?Sized,
    G: DispersionFlux<T> + ?Sized,
{
    let s: Vec<T> = (-2..=2).map(|k: i32| u.value(x + T::lit(k as f64) * h)).collect();
    let w = |j: usize| (s[j - 1] - T::lit(2.0) * s[j] + s[j + 1]) / (h * h);
    let half = T::lit(0.5);
    let flux = |j: usize| f.eval(half * (s[j] + s[j + 1])) - delta * engquist_osher_flux(w(j), w(j + 1), g);
    (flux(2) - flux(1)) / h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::{Dispersion, Transport};

    #[test]
    fn polynomial_derivatives() {
        // x^4 + x^2
        let p = Polynomial { coeffs: vec![0.0, 0.0, 1.0, 0.0, 1.0] };
        assert_eq!(p.value(2.0), 20.0);
        assert_eq!(p.derivative(1, 2.0), 36.0);
        assert_eq!(p.derivative(2, 2.0), 50.0);
        assert_eq!(p.derivative(3, 2.0), 48.0);
        assert_eq!(p.derivative(4, 2.0), 24.0);
    }

    #[test]
    fn quadratic_has_second_order_residual() {
        // u_xxx = u_xxxx = 0: the predicted term vanishes and only the O(dx^2)
        // transport truncation is left
        let u = Polynomial { coeffs: vec![0.1f64, 0.3, 0.5] };
        let r = modified_equation_residual(&u, &Transport::Burgers, &Dispersion::Square, 1.0, (0.0, 0.5), &[0.1, 0.05, 0.025])
            .unwrap();
        assert_eq!(r.raw, r.corrected);
        assert!((r.raw_order - 2.0).abs() < 0.05, "{r:?}");
    }

    #[test]
    fn sign_change_is_rejected() {
        let u = Polynomial { coeffs: vec![0.0, 0.0, 0.0, 1.0] };
        let err = modified_equation_residual(&u, &Transport::Burgers, &Dispersion::Square, 1.0, (-0.5, 0.5), &[0.1, 0.05]);
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn zero_delta_is_independent_of_dispersion() {
        let u = Polynomial { coeffs: vec![0.0f64, 0.0, 1.0, 0.0, 1.0] };
        let ladder = [1.0 / 40.0, 1.0 / 80.0];
        let a = modified_equation_residual(&u, &Transport::Burgers, &Dispersion::Square, 0.0, (0.2, 0.8), &ladder).unwrap();
        let b = modified_equation_residual(&u, &Transport::Burgers, &Dispersion::Abs, 0.0, (0.2, 0.8), &ladder).unwrap();
        assert_eq!(a, b);
        assert!((a.raw_order - 2.0).abs() < 0.1, "{a:?}");
    }
}
