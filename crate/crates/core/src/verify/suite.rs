use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::DerivOrder;
use crate::params::Differentiable;

/// Seed for the random sinc combination in [`builtin_suite`].
pub const SUITE_SEED: u64 = 0x5EED_2024;

/// `S(u) = sin(u)/u` and its first two derivatives, hand-derived.
fn unit_sinc(u: f64) -> [f64; 3] {
    if u.abs() < 0.25 {
        let u2 = u * u;
        let s0 = 1.0 + u2 * (-1.0 / 6.0 + u2 * (1.0 / 120.0 + u2 * (-1.0 / 5040.0 + u2 * (1.0 / 362_880.0 + u2 * (-1.0 / 39_916_800.0)))));
        let s1 = u * (-1.0 / 3.0 + u2 * (1.0 / 30.0 + u2 * (-1.0 / 840.0 + u2 * (1.0 / 45_360.0 + u2 * (-1.0 / 3_991_680.0)))));
        let s2 = -1.0 / 3.0 + u2 * (1.0 / 10.0 + u2 * (-1.0 / 168.0 + u2 * (1.0 / 6480.0 + u2 * (-1.0 / 443_520.0))));
        return [s0, s1, s2];
    }
    let (sin, cos) = u.sin_cos();
    let s0 = sin / u;
    let s1 = cos / u - sin / (u * u);
    let s2 = -sin / u - 2.0 * cos / (u * u) + 2.0 * sin / (u * u * u);
    [s0, s1, s2]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Shape {
    Zero,
    /// `sum c * S(B (t - a))` over `(c, a)` pairs; `B` is the function's band.
    SincSum { terms: Vec<(f64, f64)> },
    /// `S(b t)^2 + S(b t - pi/2)^2` with `b = B/2`: strictly positive, slowly varying.
    SquaredPair,
}

/// Bandlimited function with closed-form derivatives up to second order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub name: String,
    pub band: f64,
    pub description: String,
    pub shape: Shape,
}

impl TestFunction {
    pub fn sinc(band: f64, name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            band,
            description: format!("sin(B t)/(B t), B = {band}"),
            shape: Shape::SincSum { terms: vec![(1.0, 0.0)] },
        }
    }

    pub fn sinc_sum(band: f64, terms: Vec<(f64, f64)>, name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            band,
            description: format!("{}-term combination of shifted sin(B t)/(B t), B = {band}", terms.len()),
            shape: Shape::SincSum { terms },
        }
    }

    pub fn squared_pair(band: f64, name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            band,
            description: format!("S(b t)^2 + S(b t - pi/2)^2 with S(u) = sin(u)/u, b = B/2, B = {band}"),
            shape: Shape::SquaredPair,
        }
    }

    pub fn zero() -> Self {
        Self {
            name: "zero".into(),
            band: 0.0,
            description: "identically zero".into(),
            shape: Shape::Zero,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.derivs(t)[0]
    }

    /// `f^(s)(t)` for `s <= 2`.
    pub fn deriv(&self, s: DerivOrder, t: f64) -> Result<f64> {
        match s.get() {
            k @ 0..=2 => Ok(self.derivs(t)[k as usize]),
            k => Err(Error::InvalidParameter {
                name: "s",
                value: f64::from(k),
                reason: "test functions carry closed-form derivatives only up to s = 2",
            }),
        }
    }

    fn derivs(&self, t: f64) -> [f64; 3] {
        match &self.shape {
            Shape::Zero => [0.0; 3],
            Shape::SincSum { terms } => {
                let b = self.band;
                let mut out = [0.0; 3];
                for &(c, a) in terms {
                    let [s0, s1, s2] = unit_sinc(b * (t - a));
                    out[0] += c * s0;
                    out[1] += c * b * s1;
                    out[2] += c * b * b * s2;
                }
                out
            }
            Shape::SquaredPair => {
                let b = 0.5 * self.band;
                let mut out = [0.0; 3];
                for u in [b * t, b * t - FRAC_PI_2] {
                    let [s0, s1, s2] = unit_sinc(u);
                    out[0] += s0 * s0;
                    out[1] += 2.0 * b * s0 * s1;
                    out[2] += 2.0 * b * b * (s1 * s1 + s0 * s2);
                }
                out
            }
        }
    }
}

impl Differentiable for TestFunction {
    fn value(&self, x: f64) -> f64 {
        self.derivs(x)[0]
    }

    fn derivative(&self, x: f64) -> f64 {
        self.derivs(x)[1]
    }
}

/// Reference band `0.9 pi / delta_ref` with `delta_ref = 1`.
pub const NEAR_NYQUIST_BAND: f64 = 0.9 * PI;

/// The built-in test functions, in a fixed order.
pub fn builtin_suite() -> Vec<TestFunction> {
    builtin_suite_seeded(SUITE_SEED)
}

/// [`builtin_suite`] with a different draw for the random sinc combination.
pub fn builtin_suite_seeded(seed: u64) -> Vec<TestFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms = (0..5).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-6.0..6.0))).collect();
    vec![
        TestFunction::sinc(0.5, "sinc_b0.5"),
        TestFunction::sinc(1.0, "sinc_b1"),
        TestFunction::sinc(NEAR_NYQUIST_BAND, "sinc_b0.9nyq"),
        TestFunction::sinc_sum(1.5, terms, "mix5_b1.5"),
        TestFunction::squared_pair(0.5, "pair_b0.5"),
        TestFunction::squared_pair(0.04, "lowband_b0.04"),
    ]
}

/// Looks up a builtin suite member, or `"zero"`.
pub fn by_name(name: &str) -> Option<TestFunction> {
    if name == "zero" {
        return Some(TestFunction::zero());
    }
    builtin_suite().into_iter().find(|tf| tf.name == name)
}
