use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use regshannon::bounds::total_bound;
use regshannon::{DerivOrder, FunctionNorms, KernelParams, Window};
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_regshannon"));
    cmd.env_remove("REGSHANNON_OUT_DIR");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn regshannon")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// Parses CSV text into header-keyed rows.
fn csv_rows(text: &str) -> Vec<std::collections::HashMap<String, String>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            headers.iter().zip(r.iter()).map(|(h, v)| (h.to_string(), v.to_string())).collect()
        })
        .collect()
}

fn num(row: &std::collections::HashMap<String, String>, key: &str) -> f64 {
    row[key].parse().unwrap_or_else(|_| panic!("{key} = {:?} is not a number", row[key]))
}

fn sinc_unnormalized(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        t.sin() / t
    }
}

/// Writes `t,value` rows for `f` at `origin + i * delta`, `i < n`.
fn write_samples(dir: &Path, name: &str, origin: f64, delta: f64, n: usize, f: impl Fn(f64) -> f64) -> PathBuf {
    let path = dir.join(name);
    let mut text = String::from("t,value\n");
    for i in 0..n {
        let t = origin + i as f64 * delta;
        text.push_str(&format!("{t},{}\n", f(t)));
    }
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn params_feasible_default_safety() {
    let out = run(&["params", "--eta", "15", "--band", "0", "--delta", "1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 1);
    assert!((num(&rows[0], "r") - 3.1747).abs() < 1e-3);
    assert_eq!(rows[0]["m"], "27");
    assert_eq!(rows[0]["feasible"], "true");
}

#[test]
fn params_infeasible_exits_2() {
    let out = run(&["params", "--eta", "15", "--band", "3", "--delta", "1"]);
    assert_eq!(code(&out), 2);
    assert_eq!(csv_rows(&stdout(&out))[0]["feasible"], "false");
}

#[test]
fn usage_errors_exit_64() {
    for args in [
        &["params", "--eta", "-1", "--band", "0", "--delta", "1"][..],
        &["params", "--band", "0", "--delta", "1"],
        &["stencil", "--tau", "0", "--delta", "1", "--r", "3", "--sigma", "3", "--m", "8"],
        &["stencil", "--tau", "0", "--delta", "1", "--m", "8"],
        &["stencil", "--tau", "0", "--delta", "1", "--r", "3", "--m", "8", "--m1", "4", "--m2", "4"],
        &["stencil", "--tau", "0", "--delta", "1", "--r", "3", "--m1", "4"],
        &["bound", "--s", "9", "--delta", "1", "--r", "3", "--band", "1", "--m", "8", "--norm-f", "1"],
        &["verify", "--functions", "nope"],
        &["frobnicate"],
        &[],
    ] {
        let out = run(args);
        assert_eq!(code(&out), 64, "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
    assert_eq!(code(&run(&["verify", "--help"])), 0);
}

#[test]
fn bound_mirrors_library() {
    let norm = std::f64::consts::PI.sqrt();
    let out = run(&[
        "bound", "--s", "1", "--delta", "1", "--r", "3.2", "--band", "1", "--m", "32", "--norm-f", &norm.to_string(),
        "--norm-fs", "1.0233267079464885",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let row = &csv_rows(&stdout(&out))[0];
    let expected = total_bound(
        DerivOrder::new(1).unwrap(),
        &FunctionNorms::new(norm, 1.0233267079464885, 1.0).unwrap(),
        &KernelParams::from_ratio(1.0, 3.2).unwrap(),
        &Window::symmetric(32).unwrap(),
    )
    .unwrap();
    assert_eq!(num(row, "e1"), expected.e1);
    assert_eq!(num(row, "e2"), expected.e2);
    assert_eq!(num(row, "e3"), expected.e3);
    assert_eq!(num(row, "total"), expected.total);
}

#[test]
fn bound_nyquist_violation_exits_65() {
    let out = run(&["bound", "--delta", "1", "--r", "3.2", "--band", "3.5", "--m", "32", "--norm-f", "1"]);
    assert_eq!(code(&out), 65);
    let err = stderr(&out);
    assert!(err.contains("B = 3.5") && err.contains("pi/delta"), "{err}");
}

#[test]
fn stencil_at_node_is_unit_vector() {
    let out = run(&["stencil", "--s", "0", "--tau", "0", "--delta", "1", "--r", "3.2", "--m", "8"]);
    assert_eq!(code(&out), 0);
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 17);
    for row in &rows {
        let expected = if row["offset"] == "0" { 1.0 } else { 0.0 };
        assert_eq!(num(row, "weight"), expected, "{row:?}");
    }
}

#[test]
fn stencil_out_resolves_against_env_dir() {
    let dir = TempDir::new().unwrap();
    let out = bin()
        .args(["stencil", "--tau", "0.25", "--delta", "0.5", "--r", "3", "--m", "4", "--out", "w.csv"])
        .env("REGSHANNON_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).is_empty());
    let text = fs::read_to_string(dir.path().join("w.csv")).unwrap();
    assert_eq!(csv_rows(&text).len(), 9);
}

#[test]
fn stencil_io_failure_exits_74() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("missing").join("w.csv");
    let out = run(&["stencil", "--tau", "0", "--delta", "1", "--r", "3", "--m", "4", "--out", target.to_str().unwrap()]);
    assert_eq!(code(&out), 74, "{}", stderr(&out));
}

#[test]
fn approx_node_returns_stored_sample() {
    let dir = TempDir::new().unwrap();
    let input = write_samples(dir.path(), "s.csv", -40.0, 0.5, 161, sinc_unnormalized);
    let out = run(&["approx", "--input", input.to_str().unwrap(), "--t", "2,-3.5", "--r", "3.2", "--m", "32"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rows = csv_rows(&stdout(&out));
    assert_eq!(num(&rows[0], "value"), sinc_unnormalized(2.0));
    assert_eq!(num(&rows[1], "value"), sinc_unnormalized(-3.5));
}

#[test]
fn approx_sinc_between_nodes() {
    let dir = TempDir::new().unwrap();
    let input = write_samples(dir.path(), "s.csv", -40.0, 0.5, 161, sinc_unnormalized);
    let points = [0.1, 1.3, -2.77, 5.05];
    let list = points.map(|t| t.to_string()).join(",");
    let out = run(&["approx", "--input", input.to_str().unwrap(), "--t", &list, "--r", "3.2", "--m", "32"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    for (row, t) in csv_rows(&stdout(&out)).iter().zip(points) {
        assert!((num(row, "value") - sinc_unnormalized(t)).abs() < 1e-12, "t = {t}: {row:?}");
    }
}

#[test]
fn approx_short_file_exits_3_with_per_point_errors() {
    let dir = TempDir::new().unwrap();
    let input = write_samples(dir.path(), "short.csv", 0.0, 1.0, 10, sinc_unnormalized);
    let out = run(&["approx", "--input", input.to_str().unwrap(), "--t", "4.5", "--r", "3", "--m", "8"]);
    assert_eq!(code(&out), 3);
    let row = &csv_rows(&stdout(&out))[0];
    assert!(row["value"].is_empty());
    assert!(!row["error"].is_empty());
}

#[test]
fn approx_rejects_non_uniform_grid() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.csv");
    fs::write(&path, "t,value\n0,1\n1,1\n2.001,1\n3,1\n").unwrap();
    let out = run(&["approx", "--input", path.to_str().unwrap(), "--t", "1", "--r", "3", "--m", "1"]);
    assert_eq!(code(&out), 65, "{}", stderr(&out));
    assert!(stderr(&out).contains("non-uniform"));
}

#[test]
fn approx_missing_file_exits_74() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("absent.csv");
    let out = run(&["approx", "--input", path.to_str().unwrap(), "--t", "1", "--r", "3", "--m", "4"]);
    assert_eq!(code(&out), 74);
}

#[test]
fn stencil_round_trip_reproduces_approx() {
    let dir = TempDir::new().unwrap();
    let (origin, delta) = (-40.0, 0.5);
    let input = write_samples(dir.path(), "s.csv", origin, delta, 161, sinc_unnormalized);
    let samples: Vec<f64> = csv_rows(&fs::read_to_string(&input).unwrap()).iter().map(|r| num(r, "value")).collect();

    for s in ["0", "1", "2"] {
        // t = 3.25 sits at tau = 0.25 past node 86; both values are exact in binary.
        let approx = run(&["approx", "--input", input.to_str().unwrap(), "--t", "3.25", "--s", s, "--r", "3.2", "--m", "32"]);
        assert_eq!(code(&approx), 0);
        let expected = num(&csv_rows(&stdout(&approx))[0], "value");

        let stencil = run(&["stencil", "--s", s, "--tau", "0.25", "--delta", "0.5", "--r", "3.2", "--m", "32"]);
        assert_eq!(code(&stencil), 0);
        let centre = 86i64;
        let manual: f64 = csv_rows(&stdout(&stencil))
            .iter()
            .map(|r| num(r, "weight") * samples[(centre + r["offset"].parse::<i64>().unwrap()) as usize])
            .sum();
        assert!((manual - expected).abs() <= 1e-15, "s = {s}: {manual} vs {expected}");
    }
}

#[test]
fn json_output_is_versioned() {
    let out = run(&["params", "--eta", "15", "--band", "0", "--delta", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "params");
    assert_eq!(v["choice"]["m"], 27);

    let out = run(&["stencil", "--tau", "0", "--delta", "1", "--r", "3", "--m", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["weights"].as_array().unwrap().len(), 5);
}

#[test]
fn check_reports_hypotheses_and_rules() {
    let pass = run(&["check", "--function", "pair_b0.5", "--t", "0.3", "--delta", "1", "--r", "3.2", "--m", "32", "--eta", "14"]);
    assert_eq!(code(&pass), 0, "{}", stdout(&pass));
    let rows = csv_rows(&stdout(&pass));
    assert_eq!(rows.iter().filter(|r| r["check"] == "hypothesis").count(), 2);
    assert!(rows.iter().any(|r| r["check"] == "rule_m"));

    // sinc changes sign, so the literal tail hypothesis fails.
    let fail = run(&["check", "--function", "sinc_b1", "--t", "0.3", "--delta", "1", "--r", "3.2", "--m", "32"]);
    assert_eq!(code(&fail), 1);

    let small_window = run(&["check", "--function", "zero", "--t", "0", "--delta", "1", "--r", "3.2", "--m", "8", "--eta", "15"]);
    assert_eq!(code(&small_window), 1);
}

const FAST_VERIFY: [&str; 8] = ["verify", "--s", "0,1", "--m", "8,32", "--oracle-points", "10", "--r"];

fn verify_in(dir: &Path, extra: &[&str]) -> Output {
    let mut args: Vec<&str> = FAST_VERIFY.to_vec();
    args.push("3.2");
    args.extend_from_slice(extra);
    bin().args(&args).env("REGSHANNON_OUT_DIR", dir).output().unwrap()
}

#[test]
fn verify_rounding_level_cases_gate_unless_floored() {
    let dir = TempDir::new().unwrap();
    let strict = verify_in(dir.path(), &[]);
    assert_eq!(code(&strict), 1);
    let err = stderr(&strict);
    assert!(!err.is_empty());
    for line in err.lines() {
        assert!(line.starts_with("FAIL dominance") && line.contains("/m32-32:"), "{line}");
        let error: f64 = line.split("error ").nth(1).unwrap().split(' ').next().unwrap().parse().unwrap();
        assert!(error < 1e-14, "{line}");
    }

    let floored = verify_in(dir.path(), &["--floor", "1e-14", "--sweep-r", "1.0"]);
    assert_eq!(code(&floored), 0, "{}", stderr(&floored));
    for name in ["verify_cases.csv", "verify_truncation.csv", "verify_oracle.csv", "verify_sweep.csv"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    assert!(stdout(&floored).contains("PASS"));
}

#[test]
fn verify_zero_function_passes() {
    let dir = TempDir::new().unwrap();
    let out = verify_in(dir.path(), &["--functions", "zero", "--format", "json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(dir.path().join("verify_report.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "verify");
    for case in v["cases"].as_array().unwrap() {
        assert_eq!(case["empirical_l2"], 0.0);
    }
}

#[test]
fn verify_is_byte_identical_across_runs() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let extra = ["--floor", "1e-14", "--seed", "7"];
    assert_eq!(code(&verify_in(a.path(), &extra)), 0);
    assert_eq!(code(&verify_in(b.path(), &extra)), 0);
    for name in ["verify_cases.csv", "verify_truncation.csv", "verify_oracle.csv"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
}

#[test]
fn verify_bad_path_exits_74() {
    let dir = TempDir::new().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = verify_in(&blocker.join("sub"), &["--functions", "zero"]);
    assert_eq!(code(&out), 74);
}
