use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{discrete_l2, fd_oracle_scaled, TestFunction};
use crate::bounds::{interp_bound_s0, plain_truncation_bound, total_bound, FunctionNorms, Window};
use crate::error::{Error, Result};
use crate::kernel::{DerivOrder, KernelParams};
use crate::params::{check_hypotheses, HypothesisMesh};
use crate::sampling::{build_stencil, plain_shannon_approx, UniformSamples};

/// Evaluation points per grid spacing.
pub const DEFAULT_MESH: usize = 10;

/// Offset of the evaluation mesh from the interval start, in grid spacings; keeps the
/// mesh off the nodes, where interpolation is exact.
pub const MESH_PHASE: f64 = 0.0137;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub a: f64,
    pub b: f64,
}

impl Domain {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a.is_finite() && b.is_finite() && a < b {
            Ok(Self { a, b })
        } else {
            Err(Error::InvalidParameter {
                name: "domain",
                value: b - a,
                reason: "need finite endpoints with a < b",
            })
        }
    }

    /// `[-20 delta, 20 delta]`.
    pub fn default_for(delta: f64) -> Self {
        Self { a: -20.0 * delta, b: 20.0 * delta }
    }
}

/// One measured case; `ratio` is kept even when it exceeds one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub case_id: String,
    pub function: String,
    pub s: u32,
    pub delta: f64,
    pub sigma: f64,
    pub r: f64,
    pub m1: usize,
    pub m2: usize,
    pub a: f64,
    pub b: f64,
    pub band: f64,
    pub mesh_points: usize,
    pub empirical_l2: f64,
    pub max_abs: f64,
    pub norm_f: f64,
    pub norm_fs: f64,
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub bound: f64,
    pub ratio: f64,
    pub hypothesis_passed: bool,
    /// Evaluation points at which the tail hypotheses were sampled.
    pub hypothesis_points: usize,
}

impl ErrorReport {
    pub fn dominated(&self) -> bool {
        self.ratio <= 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseSpec {
    pub s: DerivOrder,
    pub params: KernelParams,
    pub window: Window,
    pub domain: Domain,
    pub mesh: usize,
}

/// Nodes `k delta` for `k` in `[floor(a/delta) - left - 1, ceil(b/delta) + right + 1]`.
fn widened_samples(tf: &TestFunction, delta: f64, domain: &Domain, left: usize, right: usize) -> Result<UniformSamples> {
    let k_lo = (domain.a / delta).floor() as i64 - left as i64 - 1;
    let k_hi = (domain.b / delta).ceil() as i64 + right as i64 + 1;
    let values = (k_lo..=k_hi).map(|k| tf.eval(k as f64 * delta)).collect();
    UniformSamples::new(values, delta, k_lo as f64 * delta)
}

fn evaluation_mesh(domain: &Domain, delta: f64, per_delta: usize) -> Vec<f64> {
    let h = delta / per_delta as f64;
    let start = domain.a + MESH_PHASE * delta;
    (0..)
        .map(|i| start + f64::from(i) * h)
        .take_while(|t| *t <= domain.b)
        .collect()
}

/// Riemann L2 norm of `f` over the span of `samples`, at `per_delta` points per spacing.
fn interval_norm(f: impl Fn(f64) -> Result<f64>, samples: &UniformSamples, per_delta: usize) -> Result<f64> {
    let h = samples.delta() / per_delta as f64;
    let n = (samples.len() - 1) * per_delta + 1;
    let mut sum = 0.0;
    for i in 0..n {
        let v = f(samples.origin() + i as f64 * h)?;
        sum += v * v;
    }
    Ok((h * sum).sqrt())
}

fn approximate_on(samples: &UniformSamples, points: &[f64], s: DerivOrder, params: &KernelParams, window: &Window) -> Result<Vec<f64>> {
    points
        .iter()
        .map(|&t| {
            let (centre, tau) = samples.locate(t);
            let stencil = build_stencil(s, tau, params, window)?;
            let lo = centre - window.m2() as i64;
            let hi = centre + window.m1() as i64;
            if lo < 0 || hi >= samples.len() as i64 {
                return Err(Error::WindowExceedsData {
                    side: if lo < 0 { crate::Side::Left } else { crate::Side::Right },
                    missing: if lo < 0 { (-lo) as usize } else { (hi + 1 - samples.len() as i64) as usize },
                });
            }
            Ok(stencil.apply(&samples.values()[lo as usize..=hi as usize]))
        })
        .collect()
}

fn fmt_case_id(name: &str, s: u32, r: f64, window: &Window) -> String {
    format!("{name}/s{s}/r{r}/m{}-{}", window.m1(), window.m2())
}

/// Samples `tf` on the widened grid, measures the regularized approximation of
/// `f^(s)` on the evaluation mesh and sets it against the theoretical bound.
///
/// Norms entering the bound are taken over the widened sample interval
/// `[a - (M2 + 1) delta, b + (M1 + 1) delta]`, which contains both window-shifted
/// intervals. Tail hypotheses are sampled at `t = a`, the midpoint and `b`.
pub fn run_case(tf: &TestFunction, spec: &CaseSpec) -> Result<ErrorReport> {
    let CaseSpec { s, params, window, domain, mesh } = *spec;
    let delta = params.delta();
    let samples = widened_samples(tf, delta, &domain, window.m2(), window.m1())?;
    let points = evaluation_mesh(&domain, delta, mesh);

    let approx = approximate_on(&samples, &points, s, &params, &window)?;
    let exact = points.iter().map(|&t| tf.deriv(s, t)).collect::<Result<Vec<_>>>()?;
    let h = delta / mesh as f64;
    let empirical_l2 = discrete_l2(&approx, &exact, h)?;
    let max_abs = approx.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);

    let norm_f = interval_norm(|t| Ok(tf.eval(t)), &samples, mesh)?;
    let norm_fs = interval_norm(|t| tf.deriv(s, t), &samples, mesh)?;
    let norms = FunctionNorms::new(norm_f, norm_fs, tf.band)?;
    let bound = total_bound(s, &norms, &params, &window)?;

    let hyp_mesh = HypothesisMesh::new(s.get(), DEFAULT_MESH)?;
    let checked = [domain.a, 0.5 * (domain.a + domain.b), domain.b];
    let mut hypothesis_passed = true;
    for &t in &checked {
        hypothesis_passed &= check_hypotheses(tf, t, &params, &window, &hyp_mesh)?.passed();
    }

    let ratio = if bound.total > 0.0 {
        empirical_l2 / bound.total
    } else if empirical_l2 == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };

    Ok(ErrorReport {
        case_id: fmt_case_id(&tf.name, s.get(), params.ratio(), &window),
        function: tf.name.clone(),
        s: s.get(),
        delta,
        sigma: params.sigma(),
        r: params.ratio(),
        m1: window.m1(),
        m2: window.m2(),
        a: domain.a,
        b: domain.b,
        band: tf.band,
        mesh_points: points.len(),
        empirical_l2,
        max_abs,
        norm_f,
        norm_fs,
        e1: bound.e1,
        e2: bound.e2,
        e3: bound.e3,
        bound: bound.total,
        ratio,
        hypothesis_passed,
        hypothesis_points: checked.len(),
    })
}

/// Every `(r, m)` pair with a symmetric window, in row-major order of `r_values`.
pub fn sweep(tf: &TestFunction, s: DerivOrder, delta: f64, r_values: &[f64], m_values: &[usize], domain: &Domain) -> Result<Vec<ErrorReport>> {
    let specs = r_values
        .iter()
        .flat_map(|&r| m_values.iter().map(move |&m| (r, m)))
        .map(|(r, m)| {
            Ok(CaseSpec {
                s,
                params: KernelParams::from_ratio(delta, r)?,
                window: Window::symmetric(m)?,
                domain: *domain,
                mesh: DEFAULT_MESH,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    specs.par_iter().map(|spec| run_case(tf, spec)).collect()
}

/// Runs every suite function against every `(s, m, r)` combination with symmetric windows.
/// Reports come back in suite, then `s`, then `m`, then `r` order.
pub fn dominance_grid(
    suite: &[TestFunction],
    s_values: &[u32],
    m_values: &[usize],
    r_values: &[f64],
    delta: f64,
    domain: &Domain,
) -> Result<Vec<ErrorReport>> {
    let mut jobs = Vec::new();
    for tf in suite {
        for &s in s_values {
            for &m in m_values {
                for &r in r_values {
                    jobs.push((
                        tf,
                        CaseSpec {
                            s: DerivOrder::new(s)?,
                            params: KernelParams::from_ratio(delta, r)?,
                            window: Window::symmetric(m)?,
                            domain: *domain,
                            mesh: DEFAULT_MESH,
                        },
                    ));
                }
            }
        }
    }
    jobs.par_iter().map(|(tf, spec)| run_case(tf, spec)).collect()
}

/// Plain vs regularized cardinal series at the same half-width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationComparison {
    pub function: String,
    pub delta: f64,
    pub m: usize,
    pub r: f64,
    pub a: f64,
    pub b: f64,
    pub norm_f: f64,
    pub regularized_l2: f64,
    pub plain_l2: f64,
    pub plain_bound: f64,
    pub interp_bound: f64,
    pub plain_within_bound: bool,
    pub regularized_better: bool,
}

/// Interpolation (`s = 0`) errors of the plain and regularized series on a symmetric
/// `m`-window, with the plain-series L2 bound and the regularized interpolation bound.
pub fn truncation_comparison(tf: &TestFunction, delta: f64, m: usize, r: f64, domain: &Domain) -> Result<TruncationComparison> {
    let params = KernelParams::from_ratio(delta, r)?;
    let window = Window::symmetric(m)?;
    let s0 = DerivOrder::new(0)?;
    let samples = widened_samples(tf, delta, domain, m, m)?;
    let points = evaluation_mesh(domain, delta, DEFAULT_MESH);
    let h = delta / DEFAULT_MESH as f64;

    let exact: Vec<f64> = points.iter().map(|&t| tf.eval(t)).collect();
    let regularized = approximate_on(&samples, &points, s0, &params, &window)?;
    let plain = points
        .iter()
        .map(|&t| plain_shannon_approx(&samples, t, s0, m))
        .collect::<Result<Vec<_>>>()?;

    let regularized_l2 = discrete_l2(&regularized, &exact, h)?;
    let plain_l2 = discrete_l2(&plain, &exact, h)?;
    let norm_f = interval_norm(|t| Ok(tf.eval(t)), &samples, DEFAULT_MESH)?;
    let plain_bound = plain_truncation_bound(norm_f, m, delta)?;
    let interp_bound = interp_bound_s0(&FunctionNorms::new(norm_f, norm_f, tf.band)?, &params, &window)?;

    Ok(TruncationComparison {
        function: tf.name.clone(),
        delta,
        m,
        r,
        a: domain.a,
        b: domain.b,
        norm_f,
        regularized_l2,
        plain_l2,
        plain_bound,
        interp_bound,
        plain_within_bound: plain_l2 <= plain_bound,
        regularized_better: regularized_l2 < plain_l2 || (regularized_l2 == 0.0 && plain_l2 == 0.0),
    })
}

/// Closed-form test-function derivative against the finite-difference oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub function: String,
    pub s: u32,
    pub t: f64,
    pub analytic: f64,
    pub oracle: f64,
    pub passed: bool,
}

/// Compares first and second derivatives of each suite member with the oracle at
/// `points` evenly spread points of `domain`, to `1e-8` relative (floored at the
/// function's sup-scale).
pub fn oracle_checks(suite: &[TestFunction], domain: &Domain, points: usize) -> Result<Vec<OracleCheck>> {
    let mut out = Vec::new();
    for tf in suite {
        let scale = 1.0 / tf.band.max(0.1);
        for s in 1..=2u32 {
            let order = DerivOrder::new(s)?;
            let floor = tf.band.powi(s as i32).max(1e-3) * 1e-3;
            for i in 0..points {
                let t = domain.a + (domain.b - domain.a) * (i as f64 + 0.377) / points as f64;
                let analytic = tf.deriv(order, t)?;
                let est = fd_oracle_scaled(|x| tf.eval(x), order, t, scale)?;
                let passed = (analytic - est.value).abs() <= 1e-8 * analytic.abs().max(floor);
                out.push(OracleCheck {
                    function: tf.name.clone(),
                    s,
                    t,
                    analytic,
                    oracle: est.value,
                    passed,
                });
            }
        }
    }
    Ok(out)
}
