//! Black-box tests of the binary: exit codes, JSON/CSV shape, round-trip
//! parsing, and determinism for a fixed seed.

use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_invstable"));
    c.env_remove("INVSTABLE_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn invstable")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn exit_codes_by_failure_class() {
    // Unknown flag -> usage (clap's own exit code 2).
    let out = run(&["fit", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));

    // Unreadable data file -> 3.
    let out = run(&[
        "fit", "--model", "poisson", "--data", "/nonexistent.csv", "--alpha", "0.5", "--rho", "1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    let record: serde_json::Value = serde_json::from_str(err.lines().last().unwrap()).unwrap();
    assert_eq!(record["error"], "data");

    // Series arguments outside the convergent regime -> 4.
    let out = run(&["ml-eval", "--series", "0.5,1,1,-100"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn fit_handles_all_zero_counts() {
    let dir = std::env::temp_dir().join("invstable_cli_zeros");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("zeros.csv");
    std::fs::write(&path, "count\n0\n0\n0\n0\n0\n").unwrap();
    let out = run(&[
        "fit", "--model", "poisson", "--data", path.to_str().unwrap(), "--alpha", "0.5",
        "--rho", "1", "--draws", "2000", "--seed", "11",
    ]);
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let est = v["point_estimate"].as_f64().unwrap();
    assert!(est.is_finite() && est > 0.0);
    assert!(v["hpd_lower"].as_f64().unwrap() < v["hpd_upper"].as_f64().unwrap());
}

#[test]
fn plot_data_round_trips_and_is_deterministic() {
    let args = [
        "plot-data", "prior", "--alpha", "0.2,0.5,0.8", "--rho", "1", "--grid", "0:5:50",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout, "same config must be byte-identical");
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("alpha,theta,density"));
    let mut rows = 0;
    for line in lines {
        let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(fields.len(), 3);
        assert!(fields[2] >= 0.0);
        rows += 1;
    }
    assert_eq!(rows, 3 * 49); // theta = 0 is skipped
}

#[test]
fn ml_eval_routes_agree() {
    // Same function through the raw series and the posterior-normalizer
    // parameterization: E^{w+1}_{alpha, alpha w + 1}(-z rho).
    let series = run(&["ml-eval", "--series", "0.5,1.75,2.5,-4"]);
    let post = run(&["ml-eval", "--posterior", "0.5,1,1.5,4"]);
    assert_eq!(series.status.code(), Some(0));
    assert_eq!(post.status.code(), Some(0));
    let sv: serde_json::Value = serde_json::from_str(stdout(&series).trim()).unwrap();
    let pv: serde_json::Value = serde_json::from_str(stdout(&post).trim()).unwrap();
    let (s, p) = (sv["value"].as_f64().unwrap(), pv["value"].as_f64().unwrap());
    assert!((s - p).abs() < 1e-4 * s.abs(), "{s} vs {p}");
}

#[test]
fn simulate_table2_emits_the_documented_schema() {
    let out = run(&[
        "simulate-table2", "--rows", "exponential", "--reps", "20", "--n", "15",
        "--draws", "200", "--seed", "3",
    ]);
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("family,true_theta,n,mean_alg1,mad_alg1,mean_alg2,mad_alg2,mean_mle,mad_mle,failed_reps")
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "Exponential");
    assert_eq!(row[2], "15");
    let mean: f64 = row[3].parse().unwrap();
    assert!((mean - 1.05).abs() < 0.2, "mean {mean}");
}

#[test]
fn mad_scale_flag_rescales_spread_columns() {
    let base = run(&[
        "simulate-table2", "--rows", "poisson", "--reps", "15", "--n", "15", "--draws",
        "200", "--seed", "5",
    ]);
    let scaled = run(&[
        "simulate-table2", "--rows", "poisson", "--reps", "15", "--n", "15", "--draws",
        "200", "--seed", "5", "--mad-scale", "1.4826",
    ]);
    let parse_row = |o: &Output| -> Vec<String> {
        stdout(o).lines().nth(1).unwrap().split(',').map(str::to_string).collect()
    };
    let (b, s) = (parse_row(&base), parse_row(&scaled));
    assert_eq!(b[3], s[3], "means must not change");
    let (mb, ms): (f64, f64) = (b[4].parse().unwrap(), s[4].parse().unwrap());
    assert!((ms / mb - 1.4826).abs() < 1e-3, "{mb} vs {ms}");
}

#[test]
fn shrink_bench_small_run() {
    let out = run(&[
        "shrink-bench", "--cases", "I", "--alphas", "0.5", "--reps", "10", "--draws",
        "1000", "--seed", "9",
    ]);
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "case,method,l1_risk,l2_squared_risk,failed_reps");
    assert_eq!(lines.len(), 3); // inverted beta + one alpha
    for line in &lines[1..] {
        let f: Vec<&str> = line.split(',').collect();
        let l1: f64 = f[2].parse().unwrap();
        assert!(l1 > 0.0 && l1 < 20.0, "{line}");
    }
}
