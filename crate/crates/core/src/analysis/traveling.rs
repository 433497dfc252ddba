//! Stationary traveling waves of `u_t + (u^2/2)_x + delta (u_xx^2)_x = 0`
//! joining `u1` on the left to `-u1` on the right.
//!
//! The profile is given implicitly by
//! `x(u) = -sgn(u) (2 delta)^(1/4) X(|u| / u1)` with
//! `X(sigma) = int_0^sigma b(tau)^(-1/2) dtau` and
//! `b(tau) = arccos(tau) - tau sqrt(1 - tau^2)`.
//! The width does not depend on `u1`. Since `b` vanishes like
//! `(1 - tau)^(3/2)` the integrand is singular at `tau = 1`; the substitution
//! `tau = 1 - r^4` removes the singularity, and the support is compact.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::Real;

/// Quadrature and tabulation settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveResolution<T> {
    /// Number of intervals of the uniform `r` ladder used for the inverse table.
    pub ladder: usize,
    /// Absolute tolerance of the adaptive quadrature on each ladder interval.
    pub tol: T,
}

impl<T: Real> Default for WaveResolution<T> {
    fn default() -> Self {
        WaveResolution { ladder: 1024, tol: T::lit(1e-14) }
    }
}

impl<T: Real> WaveResolution<T> {
    /// The same settings with half the ladder and twice the tolerance.
    pub fn halved(self) -> Self {
        WaveResolution { ladder: (self.ladder / 2).max(2), tol: self.tol * T::lit(2.0) }
    }
}

/// A sampled traveling-wave profile.
#[derive(Debug, Clone, Serialize)]
pub struct TravelingWaveProfile<T> {
    pub u1: T,
    pub delta: T,
    /// Sample abscissae, as passed in.
    pub x: Vec<T>,
    /// Profile values at `x`.
    pub u: Vec<T>,
    #[serde(skip)]
    table: InverseTable<T>,
}

/// `r_k` on a uniform ladder over `[0, 1]` with `X_k = X(1 - r_k^4)` and
/// `dr/dX` at each node.
#[derive(Debug, Clone)]
struct InverseTable<T> {
    r: Vec<T>,
    big_x: Vec<T>,
    drdx: Vec<T>,
}

/// Builds the profile for `u1 > 0`, `delta > 0` and evaluates it at `x_samples`.
pub fn traveling_wave<T: Real>(u1: T, delta: T, x_samples: &[T]) -> Result<TravelingWaveProfile<T>> {
    TravelingWaveProfile::with_resolution(u1, delta, x_samples, WaveResolution::default())
}

impl<T: Real> TravelingWaveProfile<T> {
    pub fn with_resolution(
        u1: T,
        delta: T,
        x_samples: &[T],
        resolution: WaveResolution<T>,
    ) -> Result<Self> {
        if !(u1 > T::zero()) || !(delta > T::zero()) {
            return Err(Error::Precondition(format!(
                "traveling wave needs u1 > 0 and delta > 0, got u1 = {u1}, delta = {delta}"
            )));
        }
        if resolution.ladder < 2 {
            return Err(Error::Precondition("traveling wave ladder needs at least 2 intervals".into()));
        }
        let table = InverseTable::build(resolution)?;
        let mut profile = TravelingWaveProfile { u1, delta, x: x_samples.to_vec(), u: Vec::new(), table };
        profile.u = x_samples.iter().map(|&x| profile.eval(x)).collect();
        Ok(profile)
    }

    /// `(2 delta)^(1/4)`, the width scale.
    pub fn width_scale(&self) -> T {
        (T::lit(2.0) * self.delta).sqrt().sqrt()
    }

    /// Half-width of the support: `u = -+u1` for `|x|` beyond it.
    pub fn support_half_width(&self) -> T {
        self.width_scale() * self.table.big_x[0]
    }

    /// `x(u)` for `|u| <= u1`, evaluated with the same tabulated quadrature.
    pub fn x_of_u(&self, u: T) -> T {
        let sigma = (u.abs() / self.u1).min(T::one());
        let r = (T::one() - sigma).sqrt().sqrt();
        -u.sgn() * self.width_scale() * self.table.big_x_of_r(r)
    }

    /// Profile value at `x`.
    pub fn eval(&self, x: T) -> T {
        let xi = x.abs() / self.width_scale();
        let r = self.table.r_of_big_x(xi);
        let r2 = r * r;
        let sigma = T::one() - r2 * r2;
        -x.sgn() * self.u1 * sigma
    }

    /// Evaluates the profile at new abscissae.
    pub fn sample(&self, xs: &[T]) -> Vec<T> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }
}

impl<T: Real> InverseTable<T> {
    fn build(res: WaveResolution<T>) -> Result<Self> {
        let n = res.ladder;
        let r: Vec<T> = (0..=n).map(|k| T::count(k) / T::count(n)).collect();
        // X(1 - r^4) = int_r^1 q(s) ds, accumulated from r = 1 downward
        let mut big_x = vec![T::zero(); n + 1];
        for k in (0..n).rev() {
            let piece = adaptive_gauss_kronrod(&r_integrand, r[k], r[k + 1], res.tol).ok_or_else(|| {
                let rk = r[k].as_f64();
                Error::Quadrature { at: 1.0 - rk.powi(4) }
            })?;
            big_x[k] = big_x[k + 1] + piece;
        }
        let drdx = r.iter().map(|&rk| -T::one() / r_integrand(rk)).collect();
        Ok(InverseTable { r, big_x, drdx })
    }

    fn big_x_of_r(&self, r: T) -> T {
        let n = self.r.len() - 1;
        let h = T::one() / T::count(n);
        let k = ((r / h).floor().to_usize().unwrap_or(0)).min(n - 1);
        // cubic Hermite in r with dX/dr = -q(r)
        hermite(
            self.r[k],
            self.r[k + 1],
            self.big_x[k],
            self.big_x[k + 1],
            T::one() / self.drdx[k],
            T::one() / self.drdx[k + 1],
            r,
        )
    }

    fn r_of_big_x(&self, xi: T) -> T {
        // X decreases from X(0) = big_x[0] at r = 0 to 0 at r = 1
        if xi >= self.big_x[0] {
            return T::zero();
        }
        let n = self.r.len() - 1;
        // first k with big_x[k] <= xi
        let k = self.big_x.partition_point(|&v| v > xi).clamp(1, n);
        hermite(
            self.big_x[k],
            self.big_x[k - 1],
            self.r[k],
            self.r[k - 1],
            self.drdx[k],
            self.drdx[k - 1],
            xi,
        )
        .max(T::zero())
        .min(T::one())
    }
}

/// Cubic Hermite interpolant through `(x0, y0, d0)` and `(x1, y1, d1)`.
fn hermite<T: Real>(x0: T, x1: T, y0: T, y1: T, d0: T, d1: T, x: T) -> T {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let h00 = two * t3 - three * t2 + T::one();
    let h10 = t3 - two * t2 + t;
    let h01 = three * t2 - two * t3;
    let h11 = t3 - t2;
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}

/// `b(tau)` at `tau = 1 - r^4`, written through `phi = arccos(tau)` as
/// `(2 phi - sin 2 phi) / 2`, with a series for small angles.
fn bracket_of_r<T: Real>(r: T) -> T {
    let r2 = r * r;
    let phi = T::lit(2.0) * (r2 / T::SQRT_2()).asin();
    let z = T::lit(2.0) * phi;
    let diff = if z < T::lit(0.25) {
        // z - sin z = z^3/3! - z^5/5! + z^7/7! - z^9/9! + ...
        let z2 = z * z;
        let mut term = z * z2 / T::lit(6.0);
        let mut sum = term;
        for k in 1..8 {
            let a = T::count(2 * k + 2);
            let b = T::count(2 * k + 3);
            term = -term * z2 / (a * b);
            sum += term;
        }
        sum
    } else {
        z - z.sin()
    };
    T::lit(0.5) * diff
}

/// Integrand of `X` after `tau = 1 - r^4`: `4 r^3 / sqrt(b)`, finite on `[0, 1]`.
fn r_integrand<T: Real>(r: T) -> T {
    if r == T::zero() {
        // b ~ (4 sqrt(2) / 3) r^6 as r -> 0
        return T::lit(4.0) / (T::lit(4.0) * T::SQRT_2() / T::lit(3.0)).sqrt();
    }
    T::lit(4.0) * r * r * r / bracket_of_r(r).sqrt()
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Kronrod-15 estimate and its difference from the embedded Gauss-7 rule.
fn gk15<T: Real>(f: &impl Fn(T) -> T, a: T, b: T) -> (T, T) {
    let c = T::lit(0.5) * (a + b);
    let h = T::lit(0.5) * (b - a);
    let fc = f(c);
    let mut kron = T::lit(KRONROD_WEIGHTS[7]) * fc;
    let mut gauss = T::lit(GAUSS_WEIGHTS[3]) * fc;
    for j in 0..7 {
        let dx = h * T::lit(GK_NODES[j]);
        let pair = f(c - dx) + f(c + dx);
        kron += T::lit(KRONROD_WEIGHTS[j]) * pair;
        if j % 2 == 1 {
            gauss += T::lit(GAUSS_WEIGHTS[j / 2]) * pair;
        }
    }
    (kron * h, (kron - gauss).abs() * h)
}

/// Adaptive Gauss-Kronrod quadrature by bisection; `None` when the depth
/// limit is reached before the tolerance.
pub(crate) fn adaptive_gauss_kronrod<T: Real>(f: &impl Fn(T) -> T, a: T, b: T, tol: T) -> Option<T> {
    fn go<T: Real>(f: &impl Fn(T) -> T, a: T, b: T, tol: T, depth: u32) -> Option<T> {
        let (value, err) = gk15(f, a, b);
        if !value.is_finite() {
            return None;
        }
        if err <= tol || err <= T::epsilon() * value.abs() {
            return Some(value);
        }
        if depth == 0 {
            return None;
        }
        let m = T::lit(0.5) * (a + b);
        let half = T::lit(0.5) * tol;
        Some(go(f, a, m, half, depth - 1)? + go(f, m, b, half, depth - 1)?)
    }
    go(f, a, b, tol, 30)
}
