//! Gaussian-regularized Shannon sampling.
//!
//! The cardinal series `f(t) = sum f(n*delta) sinc((t - n*delta)/delta)` is exact for
//! bandlimited `f` but converges slowly. Multiplying each kernel by a Gaussian
//! `exp(-(t - n*delta)^2 / (2 sigma^2))` makes the kernel decay fast enough that a
//! window of a few dozen nodes gives near machine precision, for both interpolation
//! and derivatives of order `s`.
//!
//! Modules:
//! - [`kernel`]: sinc, Gaussian and Hermite building blocks, and closed-form kernel derivatives.
//! - [`bounds`]: a-priori error estimates (regularization, truncation, plain cardinal series).
//! - [`sampling`]: stencils, point evaluation and banded differentiation operators.
//! - [`params`]: choosing `(r, M)` for a target accuracy, and checking the tail hypotheses.
//! - [`verify`]: test functions, finite-difference oracle and error-vs-bound harness.

pub mod bounds;
mod error;
pub mod kernel;
pub mod params;
pub mod sampling;
pub mod verify;

pub use bounds::{BoundBreakdown, FunctionNorms, Window};
pub use error::{Error, Result, Side};
pub use kernel::{DerivOrder, KernelParams};
pub use params::ParamChoice;
pub use sampling::{Stencil, UniformSamples};
