use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use regshannon::{DerivOrder, KernelParams, Window};

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "regshannon", version, about = "Regularized Shannon sampling: kernels, error bounds, parameter rules and verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pick (r, M) for a target accuracy of 10^-eta.
    Params(ParamsArgs),
    /// Print the error bound breakdown e1, e2, e3 and total.
    Bound(BoundArgs),
    /// Export kernel weights for one fractional offset as `offset,weight` rows.
    Stencil(StencilArgs),
    /// Approximate f^(s) at given points from a `t,value` sample file.
    Approx(ApproxArgs),
    /// Check the tail hypotheses (and optionally the parameter rules) for a built-in function.
    Check(CheckArgs),
    /// Run the verification harness and write reports.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; relative paths resolve against --out-dir. Omit for stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, env = "REGSHANNON_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
}

/// Exactly one of `--r` (sigma/delta) or `--sigma`.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct WidthArgs {
    /// Gaussian width in grid units, sigma/delta.
    #[arg(long)]
    pub r: Option<f64>,
    /// Gaussian width in the same units as delta.
    #[arg(long)]
    pub sigma: Option<f64>,
}

impl WidthArgs {
    pub fn params(&self, delta: f64) -> CliResult<KernelParams> {
        let params = match (self.r, self.sigma) {
            (Some(r), None) => KernelParams::from_ratio(delta, r)?,
            (None, Some(sigma)) => KernelParams::new(delta, sigma)?,
            _ => return Err(CliError::Usage("give exactly one of --r or --sigma".into())),
        };
        Ok(params)
    }
}

/// Either a symmetric `--m` or both `--m1` and `--m2`.
#[derive(Debug, Args)]
pub struct WindowArgs {
    /// Symmetric window: M1 = M2 = m.
    #[arg(long, conflicts_with_all = ["m1", "m2"], required_unless_present_all = ["m1", "m2"])]
    pub m: Option<usize>,
    /// Nodes kept to the right of the evaluation point.
    #[arg(long, requires = "m2")]
    pub m1: Option<usize>,
    /// Nodes kept to the left of the evaluation point.
    #[arg(long, requires = "m1")]
    pub m2: Option<usize>,
}

impl WindowArgs {
    pub fn window(&self) -> CliResult<Window> {
        let window = match (self.m, self.m1, self.m2) {
            (Some(m), None, None) => Window::symmetric(m)?,
            (None, Some(m1), Some(m2)) => Window::new(m1, m2)?,
            _ => return Err(CliError::Usage("give --m or both --m1 and --m2".into())),
        };
        Ok(window)
    }
}

pub fn order(s: u32) -> CliResult<DerivOrder> {
    Ok(DerivOrder::new(s)?)
}

#[derive(Debug, Args)]
pub struct ParamsArgs {
    /// Target accuracy exponent: error ~ 10^-eta.
    #[arg(long, allow_negative_numbers = true)]
    pub eta: f64,
    /// Band limit B.
    #[arg(long, allow_negative_numbers = true)]
    pub band: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: f64,
    /// Multiplier applied to the smallest admissible r.
    #[arg(long, default_value_t = regshannon::params::DEFAULT_SAFETY)]
    pub safety: f64,
    /// Largest window half-width considered feasible.
    #[arg(long, default_value_t = regshannon::params::DEFAULT_M_CAP)]
    pub m_cap: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long, default_value_t = 0)]
    pub s: u32,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: f64,
    #[command(flatten)]
    pub width: WidthArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub band: f64,
    #[command(flatten)]
    pub window: WindowArgs,
    /// L2 norm of f.
    #[arg(long, allow_negative_numbers = true)]
    pub norm_f: f64,
    /// L2 norm of f^(s); defaults to --norm-f.
    #[arg(long, allow_negative_numbers = true)]
    pub norm_fs: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct StencilArgs {
    #[arg(long, default_value_t = 0)]
    pub s: u32,
    /// Offset of the evaluation point from its left node, in [0, delta).
    #[arg(long, allow_negative_numbers = true)]
    pub tau: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: f64,
    #[command(flatten)]
    pub width: WidthArgs,
    #[command(flatten)]
    pub window: WindowArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ApproxArgs {
    /// CSV file with header `t,value` on a uniform grid.
    #[arg(long)]
    pub input: PathBuf,
    /// Evaluation points, comma separated or repeated.
    #[arg(long = "t", value_delimiter = ',', allow_negative_numbers = true, required = true)]
    pub points: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    pub s: u32,
    #[command(flatten)]
    pub width: WidthArgs,
    #[command(flatten)]
    pub window: WindowArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Built-in function name (see `verify` reports), or `zero`.
    #[arg(long)]
    pub function: String,
    /// Evaluation point the tails are measured from.
    #[arg(long, allow_negative_numbers = true)]
    pub t: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: f64,
    #[command(flatten)]
    pub width: WidthArgs,
    #[command(flatten)]
    pub window: WindowArgs,
    /// Largest Hermite index checked.
    #[arg(long, default_value_t = 0)]
    pub k_max: u32,
    #[arg(long, default_value_t = 10)]
    pub points_per_delta: usize,
    /// Tail length past the window edge, in grid spacings.
    #[arg(long, default_value_t = regshannon::params::DEFAULT_TAIL_EXTENT)]
    pub tail_extent: usize,
    /// Also test both parameter rules for this accuracy exponent.
    #[arg(long, allow_negative_numbers = true)]
    pub eta: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [0, 1, 2])]
    pub s: Vec<u32>,
    #[arg(long = "m", value_delimiter = ',', default_values_t = [8, 16, 32])]
    pub m_values: Vec<usize>,
    #[arg(long = "r", value_delimiter = ',', default_values_t = [2.8, 3.2, 3.8])]
    pub r_values: Vec<f64>,
    /// Domain start; defaults to -20 delta.
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Domain end; defaults to 20 delta.
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Seed of the random sinc combination in the suite.
    #[arg(long, default_value_t = regshannon::verify::SUITE_SEED)]
    pub seed: u64,
    /// Restrict to these suite functions.
    #[arg(long, value_delimiter = ',')]
    pub functions: Vec<String>,
    /// Extra r values for the descriptive s = 0 sweep (never gate the exit code).
    #[arg(long, value_delimiter = ',')]
    pub sweep_r: Vec<f64>,
    /// Ignore dominance violations whose measured error is at or below this absolute level.
    #[arg(long, default_value_t = 0.0)]
    pub floor: f64,
    /// Points per function for the derivative oracle checks.
    #[arg(long, default_value_t = 100)]
    pub oracle_points: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, env = "REGSHANNON_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
}
