//! Derivative oracle independent of the kernel code: central differences refined by
//! Richardson extrapolation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{binomial, DerivOrder};

const TARGET_REL: f64 = 1e-8;
const LEVELS: usize = 20;
const DEFAULT_STEP: f64 = 0.25;
/// Step shrink factor between tableau rows.
const SHRINK: f64 = 1.4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdEstimate {
    pub value: f64,
    /// Error estimate of the returned tableau entry, relative to its magnitude.
    pub achieved: f64,
    /// Step of the tableau row the estimate came from.
    pub step: f64,
}

/// `s`-th central difference quotient with step `h`, plus a rounding-error estimate.
fn central_difference(f: &impl Fn(f64) -> f64, s: u32, t: f64, h: f64) -> (f64, f64) {
    let mut sum = 0.0;
    let mut magnitude = 0.0;
    for j in 0..=s {
        let x = t + (0.5 * f64::from(s) - f64::from(j)) * h;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let term = sign * binomial(s, j) * f(x);
        sum += term;
        magnitude += term.abs();
    }
    let scale = h.powi(s as i32);
    (sum / scale, 4.0 * f64::EPSILON * magnitude / scale)
}

/// [`fd_oracle_scaled`] with unit length scale.
pub fn fd_oracle(f: impl Fn(f64) -> f64, s: DerivOrder, t: f64) -> Result<FdEstimate> {
    fd_oracle_scaled(f, s, t, 1.0)
}

/// `f^(s)(t)` from central differences with steps shrinking from `0.25 * scale`,
/// extrapolated in `h^2` (Ridders' tableau). Coarse rows can sit outside the asymptotic
/// regime, so the whole tableau is built and the entry with the smallest error estimate
/// is kept; it counts as converged when that estimate is within `1e-8` relative or
/// within the rounding floor of its step.
pub fn fd_oracle_scaled(f: impl Fn(f64) -> f64, s: DerivOrder, t: f64, scale: f64) -> Result<FdEstimate> {
    let s = s.get();
    if s == 0 {
        return Ok(FdEstimate { value: f(t), achieved: 0.0, step: 0.0 });
    }
    let mut h = DEFAULT_STEP * scale;
    let mut prev_row: Vec<f64> = Vec::new();
    let mut best = (f64::NAN, f64::INFINITY, h, f64::INFINITY);

    for level in 0..LEVELS {
        let (d, noise) = central_difference(&f, s, t, h);
        let mut row = Vec::with_capacity(level + 1);
        row.push(d);
        let mut factor = 1.0;
        for k in 1..=level {
            factor *= SHRINK * SHRINK;
            let cur = row[k - 1];
            let next = (factor * cur - prev_row[k - 1]) / (factor - 1.0);
            let err = (next - cur).abs().max((next - prev_row[k - 1]).abs());
            if err <= best.1 {
                best = (next, err, h, noise);
            }
            row.push(next);
        }
        prev_row = row;
        h /= SHRINK;
    }

    let (value, err, step, noise) = best;
    let achieved = err / value.abs().max(f64::MIN_POSITIVE);
    if err <= TARGET_REL * value.abs() || err <= 8.0 * noise {
        Ok(FdEstimate { value, achieved, step })
    } else {
        Err(Error::FdNonConvergence { best: value, achieved })
    }
}
