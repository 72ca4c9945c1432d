//! A-priori error estimates for the regularized and plain cardinal series.
//!
//! The total error of the windowed, regularized approximation of `f^(s)(t)` splits into
//! a regularization part `E1` (the Gaussian distorts the passband) and two truncation
//! parts `E2`, `E3` (nodes right and left of the window are dropped). The combined bound
//! is `sqrt(3) (e1 + e2 + e3)`.

use std::f64::consts::{LN_10, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{non_negative_finite, positive_finite, Error, Result};
use crate::kernel::{factorial, hermite_table, DerivOrder, KernelParams};

/// Exponents beyond this are combined with their prefactor in log space.
const LOG_SPACE_THRESHOLD: f64 = 700.0;

/// L2 norms of `f` and `f^(s)` and the band limit `B` of `f`.
///
/// Norms may be finite-interval surrogates rather than norms over the whole line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionNorms {
    norm_f: f64,
    norm_fs: f64,
    band: f64,
}

impl FunctionNorms {
    pub fn new(norm_f: f64, norm_fs: f64, band: f64) -> Result<Self> {
        Ok(Self {
            norm_f: non_negative_finite("norm_f", norm_f)?,
            norm_fs: non_negative_finite("norm_fs", norm_fs)?,
            band: non_negative_finite("band", band)?,
        })
    }

    pub fn norm_f(&self) -> f64 {
        self.norm_f
    }

    pub fn norm_fs(&self) -> f64 {
        self.norm_fs
    }

    pub fn band(&self) -> f64 {
        self.band
    }
}

/// Truncation window: `m1` nodes kept to the right of the centre node, `m2` to the left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    m1: usize,
    m2: usize,
}

impl Window {
    pub fn new(m1: usize, m2: usize) -> Result<Self> {
        if m1 < 2 {
            return Err(Error::WindowTooSmall { name: "m1", value: m1, min: 2 });
        }
        if m2 < 1 {
            return Err(Error::WindowTooSmall { name: "m2", value: m2, min: 1 });
        }
        Ok(Self { m1, m2 })
    }

    pub fn symmetric(m: usize) -> Result<Self> {
        Self::new(m, m)
    }

    pub fn m1(&self) -> usize {
        self.m1
    }

    pub fn m2(&self) -> usize {
        self.m2
    }

    /// Number of samples the window touches, `m1 + m2 + 1`.
    pub fn len(&self) -> usize {
        self.m1 + self.m2 + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Component bounds and their `sqrt(3)`-weighted total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundBreakdown {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub total: f64,
}

/// Target accuracy order: the aim is an error of about `10^-eta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccuracyTarget(f64);

impl AccuracyTarget {
    pub fn new(eta: f64) -> Result<Self> {
        Ok(Self(positive_finite("eta", eta)?))
    }

    pub fn eta(self) -> f64 {
        self.0
    }

    /// `sqrt(2 eta ln 10)`, the common threshold of both selection rules.
    pub fn threshold(self) -> f64 {
        (2.0 * self.0 * LN_10).sqrt()
    }
}

/// `coeff * exp(-exponent)`, moving to log space when `exp(-exponent)` would underflow.
fn damped(coeff: f64, exponent: f64) -> f64 {
    if coeff == 0.0 {
        return 0.0;
    }
    if exponent > LOG_SPACE_THRESHOLD {
        (coeff.ln() - exponent).exp()
    } else {
        coeff * (-exponent).exp()
    }
}

fn nyquist_gap(params: &KernelParams, band: f64) -> Result<f64> {
    let nyquist = params.nyquist();
    if band < nyquist {
        Ok(nyquist - band)
    } else {
        Err(Error::Nyquist { band, nyquist })
    }
}

/// Lower and upper bounds for `exp(x^2) * integral_x^inf exp(-t^2) dt`, `x >= 0`:
/// `1/(x + sqrt(x^2 + 2))` and `1/(x + sqrt(x^2 + 4/pi))`.
pub fn erfc_sandwich(x: f64) -> Result<(f64, f64)> {
    let x = non_negative_finite("x", x)?;
    let lower = 1.0 / (x + (x * x + 2.0).sqrt());
    let upper = 1.0 / (x + (x * x + 4.0 / PI).sqrt());
    Ok((lower, upper))
}

/// Uniform bound on the passband distortion `eps(omega)` for `|omega| <= B`:
/// `1 / (sigma (pi/delta - B) exp(sigma^2 (pi/delta - B)^2 / 2))`.
pub fn eps_omega_bound(params: &KernelParams, band: f64) -> Result<f64> {
    let band = non_negative_finite("band", band)?;
    let gap = nyquist_gap(params, band)?;
    let sg = params.sigma() * gap;
    Ok(damped(1.0 / sg, 0.5 * sg * sg))
}

/// Regularization error bound `||f^(s)|| / (2 pi sigma (pi/delta - B) exp(sigma^2 (pi/delta - B)^2 / 2))`.
///
/// The order `s` enters only through the caller's `norm_fs`.
pub fn e1_bound(_s: DerivOrder, norms: &FunctionNorms, params: &KernelParams) -> Result<f64> {
    let gap = nyquist_gap(params, norms.band)?;
    let sg = params.sigma() * gap;
    Ok(damped(norms.norm_fs / (2.0 * PI * sg), 0.5 * sg * sg))
}

/// Shared truncation sum. `gauss_dist` enters the Gaussian and Hermite arguments,
/// `power_dist` the `(.)^(j+1)` denominators.
fn truncation_sum(s: DerivOrder, norm_f: f64, params: &KernelParams, gauss_dist: f64, power_dist: f64) -> f64 {
    if norm_f == 0.0 {
        return 0.0;
    }
    let s = s.get();
    let delta = params.delta();
    let root2sigma = SQRT_2 * params.sigma();
    let exponent = gauss_dist * gauss_dist / (2.0 * params.sigma() * params.sigma());
    // |H_k| keeps every summand non-negative; odd k are negative at the negative argument.
    let hermite = hermite_table(s, -gauss_dist / root2sigma);
    let s_fact = factorial(s);

    let mut total = 0.0;
    for i in 0..=s {
        for j in 0..=(s - i) {
            let k = s - i - j;
            let coeff = s_fact * (PI / delta).powi(i as i32 - 1) * hermite[k as usize].abs()
                / (factorial(i) * factorial(k) * root2sigma.powi(k as i32) * power_dist.powi(j as i32 + 1));
            total += damped(norm_f * coeff, exponent);
        }
    }
    total
}

/// Right-tail truncation bound, driven by `M1 delta` (Gaussian/Hermite) and `(M1 - 1) delta`.
pub fn e2_bound(s: DerivOrder, norm_f: f64, params: &KernelParams, m1: usize) -> Result<f64> {
    let norm_f = non_negative_finite("norm_f", norm_f)?;
    if m1 < 2 {
        return Err(Error::WindowTooSmall { name: "m1", value: m1, min: 2 });
    }
    let delta = params.delta();
    Ok(truncation_sum(s, norm_f, params, m1 as f64 * delta, (m1 - 1) as f64 * delta))
}

/// Left-tail truncation bound, driven by `M2 delta` throughout.
pub fn e3_bound(s: DerivOrder, norm_f: f64, params: &KernelParams, m2: usize) -> Result<f64> {
    let norm_f = non_negative_finite("norm_f", norm_f)?;
    if m2 < 1 {
        return Err(Error::WindowTooSmall { name: "m2", value: m2, min: 1 });
    }
    let dist = m2 as f64 * params.delta();
    Ok(truncation_sum(s, norm_f, params, dist, dist))
}

/// Full bound on `||f^(s) - approximation||`.
pub fn total_bound(s: DerivOrder, norms: &FunctionNorms, params: &KernelParams, window: &Window) -> Result<BoundBreakdown> {
    let e1 = e1_bound(s, norms, params)?;
    let e2 = e2_bound(s, norms.norm_f, params, window.m1)?;
    let e3 = e3_bound(s, norms.norm_f, params, window.m2)?;
    Ok(BoundBreakdown {
        e1,
        e2,
        e3,
        total: 3f64.sqrt() * (e1 + e2 + e3),
    })
}

/// Interpolation (`s = 0`) bound written out term by term.
pub fn interp_bound_s0(norms: &FunctionNorms, params: &KernelParams, window: &Window) -> Result<f64> {
    let gap = nyquist_gap(params, norms.band)?;
    let sigma = params.sigma();
    let delta = params.delta();
    let sg = sigma * gap;
    let right = window.m1 as f64 * delta;
    let left = window.m2 as f64 * delta;
    let two_var = 2.0 * sigma * sigma;

    let reg = damped(1.0 / (2.0 * PI * sg), 0.5 * sg * sg);
    let tail_right = damped(1.0 / ((window.m1 - 1) as f64 * PI), right * right / two_var);
    let tail_left = damped(1.0 / (window.m2 as f64 * PI), left * left / two_var);
    Ok(3f64.sqrt() * norms.norm_f * (reg + tail_right + tail_left))
}

/// Heuristic bound in terms of `r = sigma/delta` and powers of ten.
///
/// Shifts the right-tail exponent to `(M1 - 1)^2`, so it only approximates
/// [`interp_bound_s0`].
pub fn simplified_eta_bound(r: f64, band: f64, delta: f64, m1: usize, m2: usize, norm_f: f64) -> Result<f64> {
    let r = positive_finite("r", r)?;
    let delta = positive_finite("delta", delta)?;
    let band = non_negative_finite("band", band)?;
    let norm_f = non_negative_finite("norm_f", norm_f)?;
    if band * delta >= PI {
        return Err(Error::Nyquist { band, nyquist: PI / delta });
    }
    if m1 < 2 {
        return Err(Error::WindowTooSmall { name: "m1", value: m1, min: 2 });
    }
    if m2 < 1 {
        return Err(Error::WindowTooSmall { name: "m2", value: m2, min: 1 });
    }
    let gap = PI - band * delta;
    let right = (m1 - 1) as f64;
    let left = m2 as f64;
    let pow10 = |x: f64| 10f64.powf(x * x / (2.0 * LN_10));

    let reg = 1.0 / (2.0 * PI * r * gap * pow10(r * gap));
    let tail_right = 1.0 / (right * delta * pow10(right / r));
    let tail_left = 1.0 / (left * delta * pow10(left / r));
    Ok(3f64.sqrt() * norm_f * (reg + tail_right + tail_left))
}

/// Pointwise bound for the plain cardinal series truncated to `|n| <= N`, with `energy`
/// the spectral energy of `f`: `(sqrt 2 / pi) sqrt(E) |sin(pi t/delta)| sqrt(N delta / ((N delta)^2 - t^2))`.
///
/// Centred at the origin rather than at `t`; reported for comparison only.
pub fn marks_truncation_bound(energy: f64, t: f64, n: usize, delta: f64) -> Result<f64> {
    let energy = non_negative_finite("energy", energy)?;
    let delta = positive_finite("delta", delta)?;
    let span = n as f64 * delta;
    if !t.is_finite() || t.abs() >= span {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t,
            reason: "must satisfy |t| < N * delta",
        });
    }
    let sine = crate::kernel::sinc_pi(t / delta) * PI * t / delta;
    Ok(SQRT_2 / PI * energy.sqrt() * sine.abs() * (span / (span * span - t * t)).sqrt())
}

/// L2 bound `2 ||f|| / sqrt((M - 2) delta)` for the plain cardinal series on a
/// symmetric `M`-window around `t`.
pub fn plain_truncation_bound(norm_f: f64, m: usize, delta: f64) -> Result<f64> {
    let norm_f = non_negative_finite("norm_f", norm_f)?;
    let delta = positive_finite("delta", delta)?;
    if m < 3 {
        return Err(Error::WindowTooSmall { name: "m", value: m, min: 3 });
    }
    Ok(2.0 * norm_f / ((m - 2) as f64 * delta).sqrt())
}
