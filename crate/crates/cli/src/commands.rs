use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use regshannon::bounds::total_bound;
use regshannon::params::{check_hypotheses, choose_capped, HypothesisMesh};
use regshannon::sampling::{approximate, build_stencil};
use regshannon::verify::{
    builtin_suite_seeded, by_name, dominance_grid, oracle_checks, sweep, truncation_comparison, Domain, ErrorReport,
    OracleCheck, TestFunction, TruncationComparison,
};
use regshannon::{DerivOrder, Error as LibError, FunctionNorms, UniformSamples};
use serde::{Deserialize, Serialize};

use crate::args::{order, ApproxArgs, BoundArgs, CheckArgs, Format, ParamsArgs, StencilArgs, VerifyArgs};
use crate::error::{exit, CliError, CliResult};
use crate::output::Sink;

/// Relative tolerance on the spacing of input sample files.
const UNIFORM_REL_TOL: f64 = 1e-9;

pub fn params(args: &ParamsArgs) -> CliResult<u8> {
    let choice = choose_capped(args.eta, args.band, args.delta, args.safety, args.m_cap)?;
    Sink::open(&args.output)?.record(args.output.format, "params", "choice", &choice)?;
    Ok(if choice.feasible { exit::OK } else { exit::INFEASIBLE })
}

pub fn bound(args: &BoundArgs) -> CliResult<u8> {
    let params = args.width.params(args.delta)?;
    let window = args.window.window()?;
    let norms = FunctionNorms::new(args.norm_f, args.norm_fs.unwrap_or(args.norm_f), args.band)?;
    let breakdown = total_bound(order(args.s)?, &norms, &params, &window)?;
    Sink::open(&args.output)?.record(args.output.format, "bound", "bound", &breakdown)?;
    Ok(exit::OK)
}

#[derive(Serialize)]
struct WeightRow {
    offset: i64,
    weight: f64,
}

pub fn stencil(args: &StencilArgs) -> CliResult<u8> {
    let params = args.width.params(args.delta)?;
    let window = args.window.window()?;
    let stencil = build_stencil(order(args.s)?, args.tau, &params, &window)?;
    let rows: Vec<WeightRow> = stencil.offsets().map(|(offset, weight)| WeightRow { offset, weight }).collect();
    Sink::open(&args.output)?.table(args.output.format, "stencil", "weights", &rows)?;
    Ok(exit::OK)
}

#[derive(Deserialize)]
struct SampleRow {
    t: f64,
    value: f64,
}

/// Reads a `t,value` file and infers the spacing, rejecting grids that are not uniform.
pub fn read_samples(path: &Path) -> CliResult<UniformSamples> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| read_error(e, path))?;
    let rows = reader
        .deserialize()
        .collect::<Result<Vec<SampleRow>, _>>()
        .map_err(|e| read_error(e, path))?;
    if rows.len() < 2 {
        return Err(CliError::Data(format!("{}: need at least two samples", path.display())));
    }
    let first = rows[0].t;
    let delta = (rows[rows.len() - 1].t - first) / (rows.len() - 1) as f64;
    if !(delta.is_finite() && delta > 0.0) {
        return Err(CliError::Data(format!("{}: sample times must increase", path.display())));
    }
    for (i, pair) in rows.windows(2).enumerate() {
        let step = pair[1].t - pair[0].t;
        if (step - delta).abs() > UNIFORM_REL_TOL * delta {
            return Err(CliError::Data(format!(
                "{}: non-uniform grid, step {step} between rows {} and {} differs from the mean spacing {delta}",
                path.display(),
                i + 1,
                i + 2
            )));
        }
    }
    let values = rows.into_iter().map(|r| r.value).collect();
    Ok(UniformSamples::new(values, delta, first)?)
}

fn read_error(e: csv::Error, path: &Path) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::Data(format!("{}: malformed sample file: {other:?}", path.display())),
    }
}

#[derive(Serialize)]
struct ApproxRow {
    t: f64,
    value: Option<f64>,
    error: Option<String>,
}

pub fn approx(args: &ApproxArgs) -> CliResult<u8> {
    let samples = read_samples(&args.input)?;
    let params = args.width.params(samples.delta())?;
    let window = args.window.window()?;
    let s = order(args.s)?;
    let mut missing = false;
    let rows = args
        .points
        .iter()
        .map(|&t| match approximate(&samples, t, s, &params, &window) {
            Ok(v) => Ok(ApproxRow { t, value: Some(v), error: None }),
            Err(e @ LibError::WindowExceedsData { .. }) => {
                missing = true;
                Ok(ApproxRow { t, value: None, error: Some(e.to_string()) })
            }
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Sink::open(&args.output)?.table(args.output.format, "approx", "points", &rows)?;
    Ok(if missing { exit::OUT_OF_WINDOW } else { exit::OK })
}

#[derive(Serialize)]
struct CheckRow {
    check: &'static str,
    k: Option<u32>,
    side: Option<&'static str>,
    passed: bool,
    first_violation: Option<f64>,
    checked_from: Option<f64>,
    checked_to: Option<f64>,
    value: Option<f64>,
    threshold: Option<f64>,
}

pub fn check(args: &CheckArgs) -> CliResult<u8> {
    let tf = by_name(&args.function).ok_or_else(|| CliError::Usage(format!("unknown function `{}`", args.function)))?;
    let params = args.width.params(args.delta)?;
    let window = args.window.window()?;
    let mesh = HypothesisMesh::new(args.k_max, args.points_per_delta)?.with_tail_extent(args.tail_extent);
    let report = check_hypotheses(&tf, args.t, &params, &window, &mesh)?;

    let mut rows = Vec::new();
    for v in &report.per_k {
        for (side, tail) in [("right", v.right), ("left", v.left)] {
            rows.push(CheckRow {
                check: "hypothesis",
                k: Some(v.k),
                side: Some(side),
                passed: tail.passed,
                first_violation: tail.first_violation,
                checked_from: Some(tail.checked_from),
                checked_to: Some(tail.checked_to),
                value: None,
                threshold: None,
            });
        }
    }
    if let Some(eta) = args.eta {
        let threshold = regshannon::bounds::AccuracyTarget::new(eta)?.threshold();
        let r = params.ratio();
        let m = window.m1().min(window.m2()) as f64;
        let band_value = r * (PI - tf.band * params.delta());
        for (name, value) in [("rule_r", band_value), ("rule_m", m / r)] {
            rows.push(CheckRow {
                check: name,
                k: None,
                side: None,
                passed: value > threshold,
                first_violation: None,
                checked_from: None,
                checked_to: None,
                value: Some(value),
                threshold: Some(threshold),
            });
        }
    }
    let passed = rows.iter().all(|r| r.passed);
    Sink::open(&args.output)?.table(args.output.format, "check", "checks", &rows)?;
    Ok(if passed { exit::OK } else { exit::VERIFY_FAILED })
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    delta: f64,
    a: f64,
    b: f64,
    seed: u64,
    floor: f64,
    cases: &'a [ErrorReport],
    sweep: &'a [ErrorReport],
    truncation: &'a [TruncationComparison],
    oracle: &'a [OracleCheck],
    failures: &'a [String],
}

pub fn verify(args: &VerifyArgs) -> CliResult<u8> {
    let mut suite = builtin_suite_seeded(args.seed);
    if !args.functions.is_empty() {
        let wants = |name: &str| args.functions.iter().any(|f| f == name);
        for name in &args.functions {
            if name != "zero" && !suite.iter().any(|tf| &tf.name == name) {
                return Err(CliError::Usage(format!("unknown function `{name}`")));
            }
        }
        suite.retain(|tf| wants(&tf.name));
        if wants("zero") {
            suite.push(TestFunction::zero());
        }
    }
    if !(args.floor.is_finite() && args.floor >= 0.0) {
        return Err(CliError::Usage(format!("--floor must be finite and >= 0, got {}", args.floor)));
    }
    let default = Domain::default_for(args.delta);
    let domain = Domain::new(args.a.unwrap_or(default.a), args.b.unwrap_or(default.b))?;

    let cases = dominance_grid(&suite, &args.s, &args.m_values, &args.r_values, args.delta, &domain)?;
    let mut sweeps = Vec::new();
    if !args.sweep_r.is_empty() {
        for tf in &suite {
            sweeps.extend(sweep(tf, DerivOrder::new(0)?, args.delta, &args.sweep_r, &args.m_values, &domain)?);
        }
    }
    let mut truncation = Vec::new();
    for tf in &suite {
        for &m in &args.m_values {
            for &r in &args.r_values {
                truncation.push(truncation_comparison(tf, args.delta, m, r, &domain)?);
            }
        }
    }
    let oracle = oracle_checks(&suite, &domain, args.oracle_points)?;

    let mut failures = Vec::new();
    for c in &cases {
        if c.hypothesis_passed && !c.dominated() && c.empirical_l2 > args.floor {
            failures.push(format!("dominance {}: error {:e} > bound {:e}", c.case_id, c.empirical_l2, c.bound));
        }
    }
    for t in truncation.iter().filter(|t| !t.plain_within_bound) {
        failures.push(format!(
            "plain-series bound {}/m{}: error {:e} > bound {:e}",
            t.function, t.m, t.plain_l2, t.plain_bound
        ));
    }
    for o in oracle.iter().filter(|o| !o.passed) {
        failures.push(format!(
            "oracle {}/s{} at t={}: analytic {:e} vs finite differences {:e}",
            o.function, o.s, o.t, o.analytic, o.oracle
        ));
    }

    fs::create_dir_all(&args.out_dir).map_err(|e| CliError::io(&args.out_dir, e))?;
    match args.format {
        Format::Csv => {
            Sink::file(&args.out_dir.join("verify_cases.csv"))?.csv(&cases)?;
            Sink::file(&args.out_dir.join("verify_truncation.csv"))?.csv(&truncation)?;
            Sink::file(&args.out_dir.join("verify_oracle.csv"))?.csv(&oracle)?;
            if !sweeps.is_empty() {
                Sink::file(&args.out_dir.join("verify_sweep.csv"))?.csv(&sweeps)?;
            }
        }
        Format::Json => {
            let report = VerifyReport {
                delta: args.delta,
                a: domain.a,
                b: domain.b,
                seed: args.seed,
                floor: args.floor,
                cases: &cases,
                sweep: &sweeps,
                truncation: &truncation,
                oracle: &oracle,
                failures: &failures,
            };
            Sink::file(&args.out_dir.join("verify_report.json"))?.json("verify", &report)?;
        }
    }

    for f in &failures {
        eprintln!("FAIL {f}");
    }
    let gated = cases.iter().filter(|c| c.hypothesis_passed).count();
    println!(
        "verify: {} cases ({gated} with passing hypotheses), {} sweep cases, {} plain-series comparisons, \
         {} oracle checks, {} failure(s): {}",
        cases.len(),
        sweeps.len(),
        truncation.len(),
        oracle.len(),
        failures.len(),
        if failures.is_empty() { "PASS" } else { "FAIL" }
    );
    Ok(if failures.is_empty() { exit::OK } else { exit::VERIFY_FAILED })
}
