//! Verification harness: bandlimited test functions with closed-form derivatives, a
//! finite-difference oracle, finite-interval L2 norms, and measured-error-vs-bound runs.

mod harness;
mod oracle;
mod suite;

pub use harness::{
    dominance_grid, oracle_checks, run_case, sweep, truncation_comparison, CaseSpec, Domain, ErrorReport, OracleCheck,
    TruncationComparison, DEFAULT_MESH, MESH_PHASE,
};
pub use oracle::{fd_oracle, fd_oracle_scaled, FdEstimate};
pub use suite::{builtin_suite, builtin_suite_seeded, by_name, Shape, TestFunction, NEAR_NYQUIST_BAND, SUITE_SEED};

use crate::error::{positive_finite, Error, Result};

/// `sqrt(delta * sum (a_i - b_i)^2)`, a Riemann-sum surrogate for the L2 distance on an
/// interval sampled with spacing `delta`.
pub fn discrete_l2(values_a: &[f64], values_b: &[f64], delta: f64) -> Result<f64> {
    if values_a.len() != values_b.len() {
        return Err(Error::LengthMismatch {
            left: values_a.len(),
            right: values_b.len(),
        });
    }
    let delta = positive_finite("delta", delta)?;
    let sum: f64 = values_a.iter().zip(values_b).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((delta * sum).sqrt())
}
