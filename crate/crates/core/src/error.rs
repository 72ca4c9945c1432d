use thiserror::Error;

/// Which end of a sample sequence a window ran off.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Left => f.write_str("left"),
            Side::Right => f.write_str("right"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("band limit B = {band} is not below the Nyquist frequency pi/delta = {nyquist}")]
    Nyquist { band: f64, nyquist: f64 },

    #[error("window too small: {name} = {value}, need at least {min}")]
    WindowTooSmall {
        name: &'static str,
        value: usize,
        min: usize,
    },

    #[error("derivative order {0} exceeds the supported maximum {max}", max = crate::kernel::DerivOrder::MAX)]
    UnsupportedOrder(u32),

    #[error("window exceeds the data on the {side} side by {missing} sample(s)")]
    WindowExceedsData { side: Side, missing: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("grid of {n_points} points is too small for half-width {m}")]
    GridTooSmall { n_points: usize, m: usize },

    #[error("function evaluation failed at x = {x}")]
    Evaluation { x: f64 },

    #[error("finite differences did not converge: best estimate {best}, achieved relative tolerance {achieved:e}")]
    FdNonConvergence { best: f64, achieved: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn positive_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and > 0",
        })
    }
}

pub(crate) fn non_negative_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and >= 0",
        })
    }
}
