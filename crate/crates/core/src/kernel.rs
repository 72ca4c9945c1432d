//! Regularized Shannon kernel and its derivatives.
//!
//! The kernel attached to node `n` is
//!
//! ```text
//! K_n(t) = sinc_pi((t - n*delta)/delta) * exp(-(t - n*delta)^2 / (2 sigma^2))
//! ```
//!
//! and its `s`-th derivative is the Leibniz product of the sinc derivatives and the
//! Gaussian derivatives, the latter expressed through physicists' Hermite polynomials.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use crate::error::{positive_finite, Error, Result};

/// Below this |z| (z = pi*(t - n*delta)/delta) sinc derivatives are summed from their
/// Taylor series; the closed form has cancelling `z^-(j+1)` poles there.
const SINC_SERIES_RADIUS: f64 = 2.0;

/// Grid spacing and Gaussian width, both in the same length units.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct KernelParams {
    delta: f64,
    sigma: f64,
}

impl KernelParams {
    pub fn new(delta: f64, sigma: f64) -> Result<Self> {
        Ok(Self {
            delta: positive_finite("delta", delta)?,
            sigma: positive_finite("sigma", sigma)?,
        })
    }

    /// Builds parameters from the grid ratio `r = sigma / delta`.
    pub fn from_ratio(delta: f64, r: f64) -> Result<Self> {
        let delta = positive_finite("delta", delta)?;
        let r = positive_finite("r", r)?;
        Self::new(delta, r * delta)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `sigma / delta`.
    pub fn ratio(&self) -> f64 {
        self.sigma / self.delta
    }

    /// `pi / delta`, the highest frequency the grid resolves.
    pub fn nyquist(&self) -> f64 {
        PI / self.delta
    }
}

/// Derivative order `s`, capped at [`DerivOrder::MAX`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub struct DerivOrder(u32);

impl DerivOrder {
    /// Factorial and Hermite growth make the closed forms poorly conditioned past this.
    pub const MAX: u32 = 8;

    pub fn new(s: u32) -> Result<Self> {
        if s > Self::MAX {
            return Err(Error::UnsupportedOrder(s));
        }
        Ok(Self(s))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn is_odd(self) -> bool {
        self.0 % 2 == 1
    }
}

impl TryFrom<u32> for DerivOrder {
    type Error = Error;

    fn try_from(s: u32) -> Result<Self> {
        Self::new(s)
    }
}

/// `sin(pi x)` with the argument reduced modulo 2 first, so integers give exactly 0.
fn sin_pi(x: f64) -> f64 {
    let reduced = x - 2.0 * (x * 0.5).round();
    if reduced == 0.0 || reduced.abs() == 1.0 {
        return 0.0;
    }
    (PI * reduced).sin()
}

/// `sin(pi x) / (pi x)`, equal to 1 at 0 and exactly 0 at nonzero integers.
pub fn sinc_pi(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    if x.fract() == 0.0 {
        return 0.0;
    }
    sin_pi(x) / (PI * x)
}

/// Gaussian regularizer `exp(-x^2 / (2 sigma^2))`.
pub fn gauss_reg(x: f64, sigma: f64) -> Result<f64> {
    let sigma = positive_finite("sigma", sigma)?;
    Ok(gauss(x, sigma))
}

fn gauss(x: f64, sigma: f64) -> f64 {
    (-(x * x) / (2.0 * sigma * sigma)).exp()
}

/// Physicists' Hermite polynomial `H_k(x)` by the three-term recurrence.
pub fn hermite_phys(k: u32, x: f64) -> f64 {
    let mut prev = 1.0;
    if k == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for j in 1..k {
        let next = 2.0 * x * cur - 2.0 * f64::from(j) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `H_0(x), ..., H_k(x)` in one pass.
pub(crate) fn hermite_table(k: u32, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(k as usize + 1);
    out.push(1.0);
    if k >= 1 {
        out.push(2.0 * x);
    }
    for j in 1..k as usize {
        let next = 2.0 * x * out[j] - 2.0 * j as f64 * out[j - 1];
        out.push(next);
    }
    out
}

pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * f64::from(n - i) / f64::from(i + 1);
    }
    acc
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Offset `(t - n*delta)/delta` in grid units, snapped to the integer when it is within
/// a few ulps of one so that node evaluations see exact integers.
fn grid_offset(t: f64, n: i64, delta: f64) -> f64 {
    let u = t / delta - n as f64;
    let nearest = u.round();
    let slack = 4.0 * f64::EPSILON * (t / delta).abs().max(1.0);
    if (u - nearest).abs() <= slack {
        nearest
    } else {
        u
    }
}

/// m-th derivative of `S(z) = sin(z)/z` with respect to `z`.
fn sinc_unit_deriv(m: u32, z: f64) -> f64 {
    if z.abs() < SINC_SERIES_RADIUS {
        sinc_unit_deriv_series(m, z)
    } else {
        sinc_unit_deriv_closed(m, z)
    }
}

// S(z) = sum_k (-1)^k z^{2k} / (2k+1)!, differentiated term by term.
fn sinc_unit_deriv_series(m: u32, z: f64) -> f64 {
    let z2 = z * z;
    let k0 = m.div_ceil(2);
    let p = 2 * k0 - m;
    // coefficient (-1)^k (2k)! / ((2k - m)! (2k + 1)!)
    let mut coeff = if k0.is_multiple_of(2) { 1.0 } else { -1.0 };
    coeff *= (p + 1..=2 * k0).map(f64::from).product::<f64>() / factorial(2 * k0 + 1);
    let mut zp = z.powi(p as i32);
    let mut sum = 0.0;
    for k in k0..k0 + 60 {
        let term = coeff * zp;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs().max(f64::MIN_POSITIVE) && k > m {
            break;
        }
        // advance k -> k+1: power grows by 2 in both (2k) and (2k - m)
        let a = f64::from(2 * k + 1);
        let b = f64::from(2 * k + 2);
        let q1 = f64::from(2 * k + 1 - m);
        let q2 = f64::from(2 * k + 2 - m);
        coeff *= -(a * b) / (q1 * q2) / ((a + 1.0) * (b + 1.0));
        zp *= z2;
    }
    sum
}

// Leibniz over sin(z) * z^{-1}: sum_j C(m,j) sin(z + (m-j) pi/2) (-1)^j j! z^{-(j+1)}.
fn sinc_unit_deriv_closed(m: u32, z: f64) -> f64 {
    let inv = 1.0 / z;
    let mut sum = 0.0;
    let mut inv_pow = inv;
    for j in 0..=m {
        let phase = (z + f64::from(m - j) * FRAC_PI_2).sin();
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sum += binomial(m, j) * phase * sign * factorial(j) * inv_pow;
        inv_pow *= inv;
    }
    sum
}

/// Unregularized cardinal kernel `sinc_pi((t - n delta)/delta)`, differentiated `s` times in `t`.
pub fn sinc_kernel_deriv(s: DerivOrder, t: f64, n: i64, delta: f64) -> Result<f64> {
    let delta = positive_finite("delta", delta)?;
    let u = grid_offset(t, n, delta);
    if s.get() == 0 {
        return Ok(sinc_pi(u));
    }
    Ok((PI / delta).powi(s.get() as i32) * sinc_unit_deriv(s.get(), PI * u))
}

/// Regularized kernel `K_n(t)`.
pub fn reg_kernel(t: f64, n: i64, params: &KernelParams) -> f64 {
    let u = grid_offset(t, n, params.delta);
    sinc_pi(u) * gauss(u * params.delta, params.sigma)
}

/// `s`-th `t`-derivative of the regularized kernel.
///
/// Computed as `sum_m C(s,m) [sinc]^(m) [gauss]^(s-m)`, which groups the three-factor
/// multinomial expansion (sine, reciprocal, Gaussian) by its first two factors. The
/// sinc factor switches to its Taylor series near the node.
pub fn reg_kernel_deriv(s: DerivOrder, t: f64, n: i64, params: &KernelParams) -> Result<f64> {
    if s.get() == 0 {
        return Ok(reg_kernel(t, n, params));
    }
    let s = s.get();
    let delta = params.delta;
    let sigma = params.sigma;
    let u = grid_offset(t, n, delta);
    let x = u * delta;
    let z = PI * u;

    let root2sigma = SQRT_2 * sigma;
    let hermite = hermite_table(s, x / root2sigma);
    let g = gauss(x, sigma);
    let scale = PI / delta;

    let mut sum = 0.0;
    for m in 0..=s {
        let k = s - m;
        let sinc_part = scale.powi(m as i32) * sinc_unit_deriv(m, z);
        let gauss_part = (-1.0 / root2sigma).powi(k as i32) * hermite[k as usize] * g;
        sum += binomial(s, m) * sinc_part * gauss_part;
    }
    Ok(sum)
}

/// Literal three-index multinomial form over `i + j + k = s`, with no near-node
/// handling. Loses precision close to nodes; kept as a cross-check of the grouped form.
pub fn reg_kernel_deriv_multinomial(s: DerivOrder, t: f64, n: i64, params: &KernelParams) -> f64 {
    let s = s.get();
    let delta = params.delta;
    let sigma = params.sigma;
    let x = t - n as f64 * delta;
    let root2sigma = SQRT_2 * sigma;
    let hermite = hermite_table(s, x / root2sigma);
    let g = gauss(x, sigma);
    let arg = PI * x / delta;

    let mut sum = 0.0;
    for i in 0..=s {
        for j in 0..=(s - i) {
            let k = s - i - j;
            let multinom = factorial(s) / (factorial(i) * factorial(j) * factorial(k));
            let sine = (PI / delta).powi(i as i32) * (arg + f64::from(i) * FRAC_PI_2).sin();
            let sign_j = if j % 2 == 0 { 1.0 } else { -1.0 };
            let recip = (delta / PI) * sign_j * factorial(j) * x.powi(-(j as i32 + 1));
            let gauss_k = (-1.0 / root2sigma).powi(k as i32) * hermite[k as usize] * g;
            sum += multinom * sine * recip * gauss_k;
        }
    }
    sum
}
