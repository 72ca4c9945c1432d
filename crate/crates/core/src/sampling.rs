//! Applying the kernels to uniformly sampled data.
//!
//! Indexing convention: for an evaluation point `t` the centre node is
//! `c = floor((t - origin)/delta)` and the fractional offset is
//! `tau = t - origin - c*delta`, in `[0, delta)`. The window covers nodes
//! `c - m2 ..= c + m1`.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::bounds::Window;
use crate::error::{positive_finite, Error, Result, Side};
use crate::kernel::{reg_kernel_deriv, sinc_kernel_deriv, DerivOrder, KernelParams};

/// Samples `values[i] = f(origin + i*delta)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformSamples {
    values: Vec<f64>,
    delta: f64,
    origin: f64,
}

impl UniformSamples {
    pub fn new(values: Vec<f64>, delta: f64, origin: f64) -> Result<Self> {
        let delta = positive_finite("delta", delta)?;
        if !origin.is_finite() {
            return Err(Error::InvalidParameter {
                name: "origin",
                value: origin,
                reason: "must be finite",
            });
        }
        if values.is_empty() {
            return Err(Error::InvalidParameter {
                name: "values",
                value: 0.0,
                reason: "need at least one sample",
            });
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "values",
                value: *bad,
                reason: "samples must be finite",
            });
        }
        Ok(Self { values, delta, origin })
    }

    /// Samples `f` at `origin + i*delta` for `i in 0..len`.
    pub fn from_fn(f: impl Fn(f64) -> f64, len: usize, delta: f64, origin: f64) -> Result<Self> {
        let values = (0..len).map(|i| f(origin + i as f64 * delta)).collect();
        Self::new(values, delta, origin)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn node(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.delta
    }

    /// Centre node index (relative to `origin`, possibly negative) and offset `tau`.
    pub fn locate(&self, t: f64) -> (i64, f64) {
        locate(t - self.origin, self.delta)
    }

    /// Index range `[c - m2, c + m1]` for `t`, or which side runs off the data and by how much.
    fn window_range(&self, centre: i64, window: &Window) -> Result<std::ops::RangeInclusive<usize>> {
        let lo = centre - window.m2() as i64;
        let hi = centre + window.m1() as i64;
        if lo < 0 {
            return Err(Error::WindowExceedsData { side: Side::Left, missing: (-lo) as usize });
        }
        let last = self.values.len() as i64 - 1;
        if hi > last {
            return Err(Error::WindowExceedsData { side: Side::Right, missing: (hi - last) as usize });
        }
        Ok(lo as usize..=hi as usize)
    }
}

fn locate(offset: f64, delta: f64) -> (i64, f64) {
    let u = offset / delta;
    let nearest = u.round();
    if (u - nearest).abs() <= 4.0 * f64::EPSILON * u.abs().max(1.0) {
        return (nearest as i64, 0.0);
    }
    let c = u.floor();
    let tau = offset - c * delta;
    (c as i64, tau.clamp(0.0, delta * (1.0 - f64::EPSILON)))
}

/// Kernel weights for one fractional offset, indexed by node offset `-m2 ..= m1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stencil {
    s: DerivOrder,
    frac_offset: f64,
    weights: Vec<f64>,
    params: KernelParams,
    window: Window,
}

impl Stencil {
    pub fn s(&self) -> DerivOrder {
        self.s
    }

    pub fn frac_offset(&self) -> f64 {
        self.frac_offset
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    /// All weights, the first one belonging to offset `-m2`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weight for node offset `n - c`; `None` outside the window.
    pub fn weight(&self, offset: i64) -> Option<f64> {
        let idx = offset + self.window.m2() as i64;
        usize::try_from(idx).ok().and_then(|i| self.weights.get(i).copied())
    }

    /// `(offset, weight)` pairs in ascending offset order.
    pub fn offsets(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let m2 = self.window.m2() as i64;
        self.weights.iter().enumerate().map(move |(i, w)| (i as i64 - m2, *w))
    }

    /// `sum w[n] * values[n]` over a slice aligned with the window.
    pub fn apply(&self, values: &[f64]) -> f64 {
        dot(&self.weights, values)
    }
}

fn dot(weights: &[f64], values: &[f64]) -> f64 {
    debug_assert_eq!(weights.len(), values.len());
    weights.iter().zip(values).fold(0.0, |acc, (w, v)| acc + w * v)
}

fn check_offset(frac_offset: f64, delta: f64) -> Result<f64> {
    if frac_offset.is_finite() && (0.0..delta).contains(&frac_offset) {
        Ok(frac_offset)
    } else {
        Err(Error::InvalidParameter {
            name: "frac_offset",
            value: frac_offset,
            reason: "must lie in [0, delta)",
        })
    }
}

/// Weights `[K_n]^(s)(tau)` for `n` in `-m2 ..= m1`.
pub fn build_stencil(s: DerivOrder, frac_offset: f64, params: &KernelParams, window: &Window) -> Result<Stencil> {
    let tau = check_offset(frac_offset, params.delta())?;
    let weights = (-(window.m2() as i64)..=window.m1() as i64)
        .map(|n| reg_kernel_deriv(s, tau, n, params))
        .collect::<Result<Vec<_>>>()?;
    Ok(Stencil {
        s,
        frac_offset: tau,
        weights,
        params: *params,
        window: *window,
    })
}

fn build_sinc_stencil(s: DerivOrder, tau: f64, delta: f64, m: usize) -> Result<Vec<f64>> {
    (-(m as i64)..=m as i64).map(|n| sinc_kernel_deriv(s, tau, n, delta)).collect()
}

fn check_grid(samples: &UniformSamples, params: &KernelParams) -> Result<()> {
    let (a, b) = (samples.delta(), params.delta());
    if (a - b).abs() > 1e-12 * a.max(b) {
        return Err(Error::InvalidParameter {
            name: "delta",
            value: b,
            reason: "kernel spacing differs from the sample spacing",
        });
    }
    Ok(())
}

/// Windowed regularized approximation of `f^(s)(t)`.
pub fn approximate(samples: &UniformSamples, t: f64, s: DerivOrder, params: &KernelParams, window: &Window) -> Result<f64> {
    check_grid(samples, params)?;
    if !t.is_finite() {
        return Err(Error::InvalidParameter { name: "t", value: t, reason: "must be finite" });
    }
    let (centre, tau) = samples.locate(t);
    let range = samples.window_range(centre, window)?;
    let stencil = build_stencil(s, tau, params, window)?;
    Ok(stencil.apply(&samples.values[range]))
}

/// Plain truncated cardinal series on a symmetric window of half-width `m`.
pub fn plain_shannon_approx(samples: &UniformSamples, t: f64, s: DerivOrder, m: usize) -> Result<f64> {
    if m < 1 {
        return Err(Error::WindowTooSmall { name: "m", value: m, min: 1 });
    }
    if !t.is_finite() {
        return Err(Error::InvalidParameter { name: "t", value: t, reason: "must be finite" });
    }
    let (centre, tau) = samples.locate(t);
    let lo = centre - m as i64;
    let hi = centre + m as i64;
    if lo < 0 {
        return Err(Error::WindowExceedsData { side: Side::Left, missing: (-lo) as usize });
    }
    let last = samples.len() as i64 - 1;
    if hi > last {
        return Err(Error::WindowExceedsData { side: Side::Right, missing: (hi - last) as usize });
    }
    let weights = build_sinc_stencil(s, tau, samples.delta(), m)?;
    Ok(dot(&weights, &samples.values[lo as usize..=hi as usize]))
}

/// Grid-to-grid derivative operator with a symmetric window.
///
/// Every interior row carries the same `tau = 0` stencil, so only that band is stored.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedOperator {
    n_points: usize,
    stencil: Stencil,
}

impl BandedOperator {
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn half_width(&self) -> usize {
        self.stencil.window().m2()
    }

    pub fn stencil(&self) -> &Stencil {
        &self.stencil
    }

    /// Rows with a full window, `m ..= n_points - 1 - m`.
    pub fn interior(&self) -> std::ops::RangeInclusive<usize> {
        let m = self.half_width();
        m..=self.n_points - 1 - m
    }

    /// Row `i` as `(column, weight)` pairs; `None` for boundary rows.
    pub fn row(&self, i: usize) -> Option<Vec<(usize, f64)>> {
        if !self.interior().contains(&i) {
            return None;
        }
        let m = self.half_width();
        Some(self.stencil.weights().iter().enumerate().map(|(j, w)| (i - m + j, *w)).collect())
    }

    /// Applies the operator, returning one value per interior row.
    pub fn apply(&self, values: &[f64]) -> Result<Vec<f64>> {
        if values.len() != self.n_points {
            return Err(Error::LengthMismatch { left: values.len(), right: self.n_points });
        }
        let width = self.stencil.weights().len();
        Ok(values.windows(width).map(|w| self.stencil.apply(w)).collect())
    }
}

/// Differentiation operator for `n_points` nodes, symmetric half-width `m`.
pub fn diff_matrix(n_points: usize, s: DerivOrder, params: &KernelParams, m: usize) -> Result<BandedOperator> {
    if n_points <= 2 * m {
        return Err(Error::GridTooSmall { n_points, m });
    }
    let window = Window::symmetric(m)?;
    Ok(BandedOperator {
        n_points,
        stencil: build_stencil(s, 0.0, params, &window)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct StencilKey {
    s: DerivOrder,
    tau_ticks: i64,
    delta_bits: u64,
    sigma_bits: u64,
    window: Window,
}

/// Shared stencil cache keyed by order, offset (quantized to `1e-12 * delta`),
/// parameters and window. A hit may return a stencil built for an offset up to
/// `0.5e-12 * delta` away from the requested one.
#[derive(Debug, Default, Clone)]
pub struct StencilCache {
    inner: Arc<RwLock<HashMap<StencilKey, Arc<Stencil>>>>,
}

impl StencilCache {
    const TICKS_PER_DELTA: f64 = 1e12;

    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_build(&self, s: DerivOrder, frac_offset: f64, params: &KernelParams, window: &Window) -> Result<Arc<Stencil>> {
        let tau = check_offset(frac_offset, params.delta())?;
        let key = StencilKey {
            s,
            tau_ticks: (tau / params.delta() * Self::TICKS_PER_DELTA).round() as i64,
            delta_bits: params.delta().to_bits(),
            sigma_bits: params.sigma().to_bits(),
            window: *window,
        };
        if let Some(hit) = self.inner.read().expect("stencil cache poisoned").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let mut guard = self.inner.write().expect("stencil cache poisoned");
        if let Some(hit) = guard.get(&key) {
            return Ok(Arc::clone(hit));
        }
        let stencil = Arc::new(build_stencil(s, tau, params, window)?);
        guard.insert(key, Arc::clone(&stencil));
        Ok(stencil)
    }

    pub fn len(&self) -> usize {
        self.inner.read().expect("stencil cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
