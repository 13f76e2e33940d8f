//! End-to-end checks of the command-line binary: output schemas, exit
//! codes, determinism, and flag/config/environment precedence.

// Angles are asserted against the literal flag values handed to the binary.
#![allow(clippy::approx_constant)]

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_phiqkd"));
    c.env_remove("PHIQKD_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn field(rows: &[Vec<String>], row: usize, name: &str) -> f64 {
    let col = rows[0]
        .iter()
        .position(|h| h == name)
        .expect("column exists");
    rows[row][col].parse().expect("numeric field")
}

fn tmp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("phiqkd-test-{}-{name}", std::process::id()))
}

#[test]
fn povm_defaults_report_usd_point() {
    let out = run(&["povm"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("P_s=0.292893219"), "{text}");
    assert!(text.contains("P_e=0"), "{text}");
    assert!(text.contains("chi = 100"), "{text}");
}

#[test]
fn povm_orthogonal_pair_is_perfect() {
    let out = run(&["povm", "--theta", "1.5707963267948966", "--phi", "0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("chi = 100.000000%"), "{text}");
    assert!(text.contains("zeta = 100.000000%"), "{text}");
}

#[test]
fn povm_erp_metrics() {
    let out = run(&[
        "povm", "--theta", "0.785398", "--phi", "0.356915", "--format", "json",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["schema_version"], "1");
    let chi = doc["metrics"]["chi"].as_f64().unwrap();
    let zeta = doc["metrics"]["zeta"].as_f64().unwrap();
    assert!((chi - 87.14).abs() < 0.02);
    assert!((zeta - 88.61).abs() < 0.02);
    assert!(doc["completeness_residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn sweep_csv_schema_and_reference_rows() {
    let out = run(&["sweep", "--grid", "0:0.186997:2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(
        text.lines().next().unwrap(),
        "phi,p_s,p_e,p_q,eta,qber,delta,q_worst,r_asymptotic,r_finite,key_length,r_secure,positive"
    );
    assert!(!text.contains('\r'), "CSV must use LF endings");
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 3);
    // phi = 0: error-free.
    assert_eq!(field(&rows, 1, "p_e"), 0.0);
    assert_eq!(field(&rows, 1, "qber"), 0.0);
    // phi at the confidence-threshold point: P_s = P_q = 0.487656.
    assert!((field(&rows, 2, "p_s") - 0.487656).abs() < 1e-5);
    assert!((field(&rows, 2, "p_q") - 0.487656).abs() < 1e-5);
}

#[test]
fn sweep_row_at_the_dominance_bound_matches_baseline() {
    let out = run(&["sweep", "--grid", "0.149123:0.149123:1"]);
    assert!(out.status.success());
    let rows = csv_rows(&stdout(&out));
    let r_secure = field(&rows, 1, "r_secure");
    assert!((r_secure - 0.156862).abs() < 2e-4, "r_secure = {r_secure}");
    assert_eq!(rows[1].last().unwrap(), "true");
}

#[test]
fn sweep_output_is_byte_identical_across_runs() {
    let a = stdout(&run(&["sweep", "--points", "64"]));
    let b = stdout(&run(&["sweep", "--points", "64"]));
    assert_eq!(a, b);
}

#[test]
fn optimize_json_round_trips_byte_identically() {
    let out = run(&[
        "optimize",
        "--theta",
        "0.785398163",
        "--mode",
        "composable",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let doc: serde_json::Value = serde_json::from_str(text.trim_end()).unwrap();
    assert_eq!(doc["schema_version"], "1");
    let phi_opt = doc["result"]["phi_opt"].as_f64().unwrap();
    assert!((phi_opt - 0.073953).abs() < 5e-4);
    let reemitted = serde_json::to_string(&doc).unwrap();
    assert_eq!(reemitted, text.trim_end(), "JSON re-emission changed bytes");
}

#[test]
fn optimize_text_reports_positive_rate() {
    let out = run(&["optimize"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("mode:       composable"), "{text}");
    assert!(text.contains("positive:   true"), "{text}");
}

#[test]
fn simulate_is_deterministic_and_env_seeded() {
    let args = [
        "simulate",
        "--phi",
        "0.073953",
        "--n-total",
        "200000",
        "--n-test",
        "20000",
    ];
    let with_flag = {
        let mut c = bin();
        c.args(args).args(["--seed", "31415"]);
        stdout(&c.output().unwrap())
    };
    let with_flag_again = {
        let mut c = bin();
        c.args(args).args(["--seed", "31415"]);
        stdout(&c.output().unwrap())
    };
    assert_eq!(with_flag, with_flag_again);
    let with_env = {
        let mut c = bin();
        c.args(args).env("PHIQKD_SEED", "31415");
        stdout(&c.output().unwrap())
    };
    assert_eq!(with_flag, with_env, "environment seed must match the flag");
    // The flag wins over the environment.
    let flag_beats_env = {
        let mut c = bin();
        c.args(args)
            .args(["--seed", "31415"])
            .env("PHIQKD_SEED", "999");
        stdout(&c.output().unwrap())
    };
    assert_eq!(with_flag, flag_beats_env);
}

#[test]
fn simulate_histogram_mode_counts_all_shots() {
    let out = run(&[
        "simulate",
        "--histogram",
        "--phi",
        "0.356915",
        "--shots",
        "100000",
        "--seed",
        "7",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let counts = doc["histogram"]["counts"].as_array().unwrap();
    let total: u64 = counts.iter().map(|c| c.as_u64().unwrap()).sum();
    assert_eq!(total, 100_000);
    assert_eq!(doc["histogram"]["map"]["correct"], "00");
}

#[test]
fn degrees_flag_converts_angles() {
    let rad = stdout(&run(&[
        "povm",
        "--theta",
        "0.78539816339744830961",
        "--format",
        "json",
    ]));
    let deg = stdout(&run(&[
        "povm",
        "--theta",
        "45",
        "--degrees",
        "--format",
        "json",
    ]));
    let rad: serde_json::Value = serde_json::from_str(&rad).unwrap();
    let deg: serde_json::Value = serde_json::from_str(&deg).unwrap();
    let a = rad["probs_closed"]["p_s"].as_f64().unwrap();
    let b = deg["probs_closed"]["p_s"].as_f64().unwrap();
    assert!((a - b).abs() < 1e-12);
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let path = tmp_path("config");
    std::fs::write(
        &path,
        "# defaults\ntheta=0.9\nn-total=400000\nn-test=40000\n",
    )
    .unwrap();
    let from_file = stdout(&run(&[
        "optimize",
        "--config",
        path.to_str().unwrap(),
        "--format",
        "json",
    ]));
    let doc: serde_json::Value = serde_json::from_str(&from_file).unwrap();
    assert!((doc["result"]["theta"].as_f64().unwrap() - 0.9).abs() < 1e-12);

    let overridden = stdout(&run(&[
        "optimize",
        "--config",
        path.to_str().unwrap(),
        "--theta",
        "0.785398",
        "--format",
        "json",
    ]));
    let doc: serde_json::Value = serde_json::from_str(&overridden).unwrap();
    assert!((doc["result"]["theta"].as_f64().unwrap() - 0.785398).abs() < 1e-12);
    std::fs::remove_file(&path).ok();
}

#[test]
fn config_file_rejects_unknown_keys() {
    let path = tmp_path("badconfig");
    std::fs::write(&path, "thetas=0.9\n").unwrap();
    let out = run(&["optimize", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_file(&path).ok();
}

#[test]
fn simulate_reports_no_key_when_sifting_falls_short() {
    // At zero tilt only ~29% of rounds sift; demanding more test bits than
    // that is an explicit no-key outcome, not an argument error.
    let args = [
        "simulate",
        "--phi",
        "0",
        "--n-total",
        "200000",
        "--n-test",
        "150000",
        "--seed",
        "5",
    ];
    let out = run(&args);
    assert!(out.status.success());
    assert!(stdout(&out).contains("no key"), "{}", stdout(&out));
    let out = bin().args(args).arg("--require-positive").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn compare_b92_reference_row() {
    let out = run(&[
        "compare-b92",
        "--grid",
        "0.7853981633974483:0.7853981633974483:1",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(
        text.lines().next().unwrap(),
        "theta,phi_opt,r_phiqkd,r_b92,difference,improvement,phi_bound,coverage"
    );
    let rows = csv_rows(&text);
    assert!((field(&rows, 1, "coverage") - 37.97).abs() < 0.2);
    assert!((field(&rows, 1, "phi_bound") - 0.149123).abs() < 5e-4);
    assert!((field(&rows, 1, "improvement") - 16.0).abs() < 0.5);
}

#[test]
fn exit_codes_cover_usage_and_positivity() {
    // Unknown flag: usage error.
    assert_eq!(run(&["povm", "--bogus"]).status.code(), Some(2));
    // Malformed grid spec: usage error.
    assert_eq!(run(&["sweep", "--grid", "nope"]).status.code(), Some(2));
    // Out-of-domain angle: argument error.
    assert_eq!(run(&["povm", "--theta", "2.0"]).status.code(), Some(2));
    // Tilt beyond the admissible domain.
    assert_eq!(
        run(&["povm", "--theta", "0.785398", "--phi", "1.0"])
            .status
            .code(),
        Some(2)
    );
    // No positive key at a tiny overlap angle with positivity required.
    let out = run(&["optimize", "--theta", "0.1", "--require-positive"]);
    assert_eq!(out.status.code(), Some(1));
    // Same command without the requirement succeeds.
    assert!(run(&["optimize", "--theta", "0.1"]).status.success());
    // Help exits zero.
    assert!(run(&["--help"]).status.success());
}

#[test]
fn output_file_receives_the_document() {
    let path = tmp_path("sweep.csv");
    let out = run(&["sweep", "--points", "8", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty(), "stdout stays clean with --output");
    let written = std::fs::read_to_string(&path).unwrap();
    assert!(written.starts_with("phi,"));
    std::fs::remove_file(&path).ok();
}
