//! Choosing the grid ratio `r = sigma/delta` and window half-width `M` for a target
//! accuracy `10^-eta`, and checking the tail-monotonicity hypotheses behind the
//! truncation bounds.
//!
//! With every non-exponential prefactor taken as one and `M = M1 - 1 = M2`, the
//! regularization and truncation terms fall below `10^-eta` once
//!
//! ```text
//! r (pi - B delta) > sqrt(2 eta ln 10)     and     M / r > sqrt(2 eta ln 10).
//! ```

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bounds::{AccuracyTarget, Window};
use crate::error::{non_negative_finite, positive_finite, Error, Result};
use crate::kernel::{hermite_table, KernelParams};

/// Windows wider than this are reported infeasible by [`choose`].
pub const DEFAULT_M_CAP: usize = 200;

/// Default multiplier applied to the smallest admissible `r`.
pub const DEFAULT_SAFETY: f64 = 1.2;

/// Default extent of the hypothesis check beyond the window, in grid spacings.
pub const DEFAULT_TAIL_EXTENT: usize = 20;

/// Relative step used to push `r` off an exact tie with the rule.
const TIE_NUDGE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamChoice {
    /// `sigma / delta`.
    pub r: f64,
    /// Symmetric half-width `M`; use `M1 = M + 1`, `M2 = M`.
    pub m: usize,
    pub eta: f64,
    pub feasible: bool,
    pub band: f64,
    pub delta: f64,
    /// Smallest admissible `r` before the safety factor.
    pub min_r: f64,
    pub safety: f64,
    pub m_cap: usize,
}

impl ParamChoice {
    /// The window the rule assumes: `M1 = M + 1`, `M2 = M`.
    pub fn window(&self) -> Result<Window> {
        Window::new(self.m + 1, self.m)
    }

    pub fn kernel_params(&self) -> Result<KernelParams> {
        KernelParams::from_ratio(self.delta, self.r)
    }

    /// Re-evaluates both strict inequalities with the stored values.
    pub fn satisfies_rules(&self) -> bool {
        let threshold = (2.0 * self.eta * std::f64::consts::LN_10).sqrt();
        self.r * (PI - self.band * self.delta) > threshold && self.m as f64 / self.r > threshold
    }
}

fn band_gap(band: f64, delta: f64) -> Result<f64> {
    let band = non_negative_finite("band", band)?;
    let delta = positive_finite("delta", delta)?;
    let gap = PI - band * delta;
    if gap > 0.0 {
        Ok(gap)
    } else {
        Err(Error::Nyquist { band, nyquist: PI / delta })
    }
}

/// Infimum of admissible ratios: `sqrt(2 eta ln 10) / (pi - B delta)`.
pub fn min_r(eta: f64, band: f64, delta: f64) -> Result<f64> {
    let target = AccuracyTarget::new(eta)?;
    Ok(target.threshold() / band_gap(band, delta)?)
}

/// Smallest integer `M` with `M / r > sqrt(2 eta ln 10)`.
pub fn min_m(eta: f64, r: f64) -> Result<usize> {
    let target = AccuracyTarget::new(eta)?;
    let r = positive_finite("r", r)?;
    let threshold = target.threshold();
    let product = r * threshold;
    let mut m = product.ceil();
    if m == product {
        m += 1.0;
    }
    let mut m = m.max(1.0) as usize;
    while m as f64 / r <= threshold {
        m += 1;
    }
    Ok(m)
}

/// [`choose_capped`] with [`DEFAULT_M_CAP`].
pub fn choose(eta: f64, band: f64, delta: f64, safety: f64) -> Result<ParamChoice> {
    choose_capped(eta, band, delta, safety, DEFAULT_M_CAP)
}

/// Picks `r = safety * min_r` (nudged up until the rule holds strictly) and
/// `m = min_m(eta, r)`. A window wider than `m_cap` is returned with
/// `feasible = false`.
pub fn choose_capped(eta: f64, band: f64, delta: f64, safety: f64, m_cap: usize) -> Result<ParamChoice> {
    if !(safety.is_finite() && safety >= 1.0) {
        return Err(Error::InvalidParameter {
            name: "safety",
            value: safety,
            reason: "must be finite and >= 1",
        });
    }
    let threshold = AccuracyTarget::new(eta)?.threshold();
    let gap = band_gap(band, delta)?;
    let floor = threshold / gap;

    let mut r = floor * safety;
    while r * gap <= threshold {
        r *= 1.0 + TIE_NUDGE;
    }
    let m = min_m(eta, r)?;
    Ok(ParamChoice {
        r,
        m,
        eta,
        feasible: m <= m_cap,
        band,
        delta,
        min_r: floor,
        safety,
        m_cap,
    })
}

/// Value and first derivative of a function; the input to [`check_hypotheses`].
pub trait Differentiable {
    fn value(&self, x: f64) -> f64;
    fn derivative(&self, x: f64) -> f64;
}

impl<F, G> Differentiable for (F, G)
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    fn value(&self, x: f64) -> f64 {
        (self.0)(x)
    }

    fn derivative(&self, x: f64) -> f64 {
        (self.1)(x)
    }
}

/// Mesh over which the tail conditions are sampled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypothesisMesh {
    /// Largest Hermite index checked.
    pub k_max: u32,
    /// Mesh points per grid spacing; at least 10.
    pub points_per_delta: usize,
    /// How many grid spacings past the window edge to check.
    pub tail_extent: usize,
}

impl HypothesisMesh {
    pub fn new(k_max: u32, points_per_delta: usize) -> Result<Self> {
        if points_per_delta < 10 {
            return Err(Error::InvalidParameter {
                name: "points_per_delta",
                value: points_per_delta as f64,
                reason: "need at least 10 mesh points per grid spacing",
            });
        }
        Ok(Self {
            k_max,
            points_per_delta,
            tail_extent: DEFAULT_TAIL_EXTENT,
        })
    }

    pub fn with_tail_extent(mut self, tail_extent: usize) -> Self {
        self.tail_extent = tail_extent;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailVerdict {
    pub passed: bool,
    /// Smallest-distance violating mesh point, if any.
    pub first_violation: Option<f64>,
    pub checked_from: f64,
    pub checked_to: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HermiteVerdict {
    pub k: u32,
    pub right: TailVerdict,
    pub left: TailVerdict,
}

impl HermiteVerdict {
    pub fn passed(&self) -> bool {
        self.right.passed && self.left.passed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub t: f64,
    pub per_k: Vec<HermiteVerdict>,
}

impl HypothesisReport {
    pub fn passed(&self) -> bool {
        self.per_k.iter().all(HermiteVerdict::passed)
    }
}

/// Checks, for `k = 0..=k_max` and `g(x) = f(x) H_k((t - x)/(sqrt 2 sigma))`,
///
/// - `g'(x) <= g(x) (x - t)/sigma^2` on `[t + (M1 - 1) delta, t + (M1 + extent) delta]`,
/// - `g'(x) >= g(x) (x - t)/sigma^2` on `[t - (M2 + extent) delta, t - M2 delta]`,
///
/// at mesh points only. Equivalently `g(x) exp(-(x - t)^2 / (2 sigma^2))` must be
/// non-increasing on the right tail and non-decreasing on the left tail.
pub fn check_hypotheses<F: Differentiable + ?Sized>(
    f: &F,
    t: f64,
    params: &KernelParams,
    window: &Window,
    mesh: &HypothesisMesh,
) -> Result<HypothesisReport> {
    let delta = params.delta();
    let sigma = params.sigma();
    let root2sigma = std::f64::consts::SQRT_2 * sigma;
    let right_steps = mesh.points_per_delta * (mesh.tail_extent + 1);
    let left_steps = mesh.points_per_delta * mesh.tail_extent;
    let h = delta / mesh.points_per_delta as f64;

    let right_from = t + (window.m1() as f64 - 1.0) * delta;
    let left_to = t - window.m2() as f64 * delta;

    let mut right = vec![None; mesh.k_max as usize + 1];
    let mut left = vec![None; mesh.k_max as usize + 1];

    let visit = |x: f64, want_decreasing: bool, out: &mut Vec<Option<f64>>| -> Result<()> {
        let fx = f.value(x);
        let dfx = f.derivative(x);
        if !fx.is_finite() || !dfx.is_finite() {
            return Err(Error::Evaluation { x });
        }
        let arg = (t - x) / root2sigma;
        let hermite = hermite_table(mesh.k_max + 1, arg);
        for k in 0..=mesh.k_max as usize {
            if out[k].is_some() {
                continue;
            }
            // d/dx H_k((t - x)/(sqrt 2 sigma)) = -2k H_{k-1}(.) / (sqrt 2 sigma)
            let dh = if k == 0 { 0.0 } else { -2.0 * k as f64 * hermite[k - 1] / root2sigma };
            let g = fx * hermite[k];
            let dg = dfx * hermite[k] + fx * dh;
            let rhs = g * (x - t) / (sigma * sigma);
            let slack = 1e-13 * (dg.abs() + rhs.abs());
            let violated = if want_decreasing { dg > rhs + slack } else { dg < rhs - slack };
            if violated {
                out[k] = Some(x);
            }
        }
        Ok(())
    };

    for i in 0..=right_steps {
        visit(right_from + i as f64 * h, true, &mut right)?;
    }
    for i in 0..=left_steps {
        visit(left_to - i as f64 * h, false, &mut left)?;
    }

    let reach = mesh.tail_extent as f64 * delta;
    let per_k = (0..=mesh.k_max)
        .map(|k| {
            let r = right[k as usize];
            let l = left[k as usize];
            HermiteVerdict {
                k,
                right: TailVerdict {
                    passed: r.is_none(),
                    first_violation: r,
                    checked_from: right_from,
                    checked_to: right_from + reach + delta,
                },
                left: TailVerdict {
                    passed: l.is_none(),
                    first_violation: l,
                    checked_from: left_to - reach,
                    checked_to: left_to,
                },
            }
        })
        .collect();
    Ok(HypothesisReport { t, per_k })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_r_values() {
        let v = min_r(15.0, 0.0, 1.0).unwrap();
        assert!((v - 2.645_565_990_819_502).abs() < 1e-14);
        assert!(min_r(1e-12, 0.0, 1.0).unwrap() < 1e-5);
        assert!(matches!(min_r(15.0, PI, 1.0), Err(Error::Nyquist { .. })));
        assert!(min_r(0.0, 0.0, 1.0).is_err());
        assert!(min_r(-1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn min_m_values() {
        assert_eq!(min_m(15.0, 3.97).unwrap(), 33);
        assert_eq!(min_m(1e-9, 1.0).unwrap(), 1);
        // a product that lands on an integer needs the next one
        let threshold = (2.0 * 2.0 * std::f64::consts::LN_10).sqrt();
        let r = 10.0 / threshold;
        let m = min_m(2.0, r).unwrap();
        assert!(m as f64 / r > threshold);
        assert!((m - 1) as f64 / r <= threshold);
    }

    #[test]
    fn choose_default_safety() {
        let c = choose(15.0, 0.0, 1.0, DEFAULT_SAFETY).unwrap();
        assert!((c.r - 3.174_679_188_983_402).abs() < 1e-12);
        assert_eq!(c.m, 27);
        assert!(c.feasible);
        assert!(c.satisfies_rules());
        assert_eq!(c.window().unwrap(), Window::new(28, 27).unwrap());
    }

    #[test]
    fn choose_near_nyquist_is_infeasible() {
        let c = choose(15.0, 3.0, 1.0, DEFAULT_SAFETY).unwrap();
        assert!((c.min_r - 58.7).abs() < 0.1, "{}", c.min_r);
        assert!(c.m > DEFAULT_M_CAP);
        assert_eq!(c.m, min_m(15.0, c.r).unwrap());
        assert!(!c.feasible);
        let c = choose_capped(15.0, 3.0, 1.0, 1.0, 10_000).unwrap();
        assert!(c.feasible);
    }

    #[test]
    fn choose_nudges_ties() {
        let c = choose(4.0, 0.0, 1.0, 1.0).unwrap();
        assert!(c.r > c.min_r);
        assert!((c.r - c.min_r) / c.min_r < 1e-10);
        assert!(c.satisfies_rules());
        assert!(choose(4.0, 0.0, 1.0, 0.9).is_err());
    }

    fn gaussian(width: f64) -> impl Differentiable {
        (
            move |x: f64| (-x * x / (2.0 * width * width)).exp(),
            move |x: f64| -x / (width * width) * (-x * x / (2.0 * width * width)).exp(),
        )
    }

    #[test]
    fn zero_function_passes() {
        let zero = (|_: f64| 0.0, |_: f64| 0.0);
        let p = KernelParams::from_ratio(1.0, 3.2).unwrap();
        let rep = check_hypotheses(&zero, 0.7, &p, &Window::symmetric(8).unwrap(), &HypothesisMesh::new(4, 10).unwrap()).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.per_k.len(), 5);
    }

    #[test]
    fn narrow_gaussian_passes_for_k0() {
        let p = KernelParams::from_ratio(1.0, 3.2).unwrap();
        let rep = check_hypotheses(&gaussian(2.0), 0.0, &p, &Window::symmetric(8).unwrap(), &HypothesisMesh::new(0, 10).unwrap()).unwrap();
        assert!(rep.passed());
        let right = rep.per_k[0].right;
        assert_eq!(right.checked_from, 7.0);
        assert_eq!(right.checked_to, 28.0);
    }

    #[test]
    fn growing_exponential_fails_on_the_right() {
        let sigma = 3.2;
        let f = (
            move |x: f64| (x * x / (sigma * sigma)).exp(),
            move |x: f64| 2.0 * x / (sigma * sigma) * (x * x / (sigma * sigma)).exp(),
        );
        let p = KernelParams::from_ratio(1.0, sigma).unwrap();
        let rep = check_hypotheses(&f, 0.0, &p, &Window::symmetric(4).unwrap(), &HypothesisMesh::new(0, 10).unwrap()).unwrap();
        assert!(!rep.passed());
        let v = rep.per_k[0].right;
        assert!(!v.passed);
        assert_eq!(v.first_violation, Some(3.0));
    }

    #[test]
    fn mesh_verdict_matches_sign_analysis() {
        // f(x) = exp(a x): g' - g (x - t)/sigma^2 = g (a - (x - t)/sigma^2) for k = 0.
        // Right tail passes iff a <= (M1 - 1) delta / sigma^2.
        let p = KernelParams::from_ratio(1.0, 2.0).unwrap();
        let w = Window::symmetric(5).unwrap();
        let mesh = HypothesisMesh::new(0, 10).unwrap();
        for &(a, expect) in &[(0.5, true), (0.99, true), (1.01, false), (3.0, false)] {
            let f = (move |x: f64| (a * x).exp(), move |x: f64| a * (a * x).exp());
            let rep = check_hypotheses(&f, 0.0, &p, &w, &mesh).unwrap();
            assert_eq!(rep.per_k[0].right.passed, expect, "a={a}");
        }
    }

    #[test]
    fn evaluation_failure_propagates() {
        let f = (|x: f64| if x > 5.0 { f64::NAN } else { 1.0 }, |_: f64| 0.0);
        let p = KernelParams::from_ratio(1.0, 3.0).unwrap();
        let err = check_hypotheses(&f, 0.0, &p, &Window::symmetric(4).unwrap(), &HypothesisMesh::new(1, 10).unwrap());
        assert!(matches!(err, Err(Error::Evaluation { .. })));
        assert!(HypothesisMesh::new(1, 5).is_err());
    }
}
