//! End-to-end tests of the `sumsq` binary: exit codes, report structure,
//! and reproducibility.

use std::process::{Command, Output};

fn sumsq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sumsq")).args(args).output().expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

#[test]
fn verify_all_small_grid_exits_zero() {
    let out = sumsq(&["verify-all", "--field", "3", "--n-max", "2", "--shards", "2"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(report["all_ok"], serde_json::json!(true));
    assert_eq!(report["config"]["command"], serde_json::json!("verify-all"));
    assert_eq!(report["version"], serde_json::json!(env!("CARGO_PKG_VERSION")));
}

#[test]
fn even_characteristic_is_a_usage_error() {
    let out = sumsq(&["variance", "--field", "4", "--n", "2", "--m", "1", "--h", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stderr).trim()).unwrap();
    assert!(err["error"].as_str().unwrap().contains("characteristic 2"));
}

#[test]
fn census_parameter_violation_is_a_usage_error() {
    let out = sumsq(&["ncount", "--field", "3", "--n", "1", "--m", "1", "--h", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_subcommand_is_a_usage_error() {
    let out = sumsq(&[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn variance_report_round_trips_and_matches() {
    let out = sumsq(&[
        "variance", "--field", "3", "--n", "2", "--m", "1", "--h", "0", "--gamma", "2",
        "--method", "both",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(report["match"], serde_json::json!(true));
    assert_eq!(report["closed"]["num"], serde_json::json!("18"));
    assert_eq!(report["closed"]["scale"]["q"], serde_json::json!(3));
    assert_eq!(report["closed"]["scale"]["exponent"], serde_json::json!(4));
    assert!(report["elapsed_ms"].is_number());
}

#[test]
fn theorem_check_csv_has_the_contract_header() {
    let out = sumsq(&["theorem-check", "--field", "3", "--n-max", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "n,m,h,gamma,case,subcase,closed,brute,match");
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    // full sweep: all (n, m, h, gamma) with n <= 2
    assert_eq!(rows.len(), (3 + 5) * 2 + 5 * 2);
    assert!(rows.iter().all(|r| r.ends_with(",true")));
}

#[test]
fn hankel_reduce_reports_the_normal_form() {
    let out = sumsq(&["hankel", "reduce", "--field", "3", "--seq", "1,0,0,0,1"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(report["rho_s"], serde_json::json!(1));
    assert_eq!(report["pi_s"], serde_json::json!(1));
    assert_eq!(report["rank"], serde_json::json!(2));
    assert_eq!(report["certificate_ok"], serde_json::json!(true));
    assert_eq!(
        report["reduced"],
        serde_json::json!([["1", "0", "0"], ["0", "0", "0"], ["0", "0", "1"]])
    );
    assert_eq!(report["partition"]["tail"], serde_json::json!([1]));
}

#[test]
fn multiset_closed_comparison_matches() {
    let out = sumsq(&[
        "multiset", "--field", "3", "--seq", "1,0,0,0,1", "--mode", "monic", "--compare",
        "closed",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(report["match"], serde_json::json!(true));
    assert_eq!(report["enumerated"], report["reference"]);
    assert_eq!(report["mass"], serde_json::json!("9"));
}

#[test]
fn multiset_closed_comparison_rejects_full_mode() {
    let out = sumsq(&[
        "multiset", "--field", "3", "--seq", "1,0,0,0,1", "--mode", "full", "--compare",
        "closed",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ncount_cells_all_match() {
    let out = sumsq(&["ncount", "--field", "3", "--n", "3", "--m", "1", "--h", "0", "--mode",
        "both", "--shards", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(report["all_match"], serde_json::json!(true));
    let cells = report["cells"].as_array().unwrap();
    assert!(cells.iter().any(|c| c["rho2"] == serde_json::json!(0)
        && c["rho1"] == serde_json::json!(0)
        && c["closed"] == serde_json::json!("3")));
}

#[test]
fn charsum_routes_agree() {
    let out = sumsq(&["charsum", "--field", "3", "--seq", "0,0,0,0,1"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(report["match"], serde_json::json!(true));
    assert_eq!(report["closed"], serde_json::json!("81"));
}

#[test]
fn extension_field_spec_works_end_to_end() {
    let out = sumsq(&["hankel", "reduce", "--field", "3^2:1,0,1", "--seq", "0,1;1;0,1;0;2"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(report["certificate_ok"], serde_json::json!(true));
}

// identical configuration => byte-identical report apart from the isolated
// timestamp and elapsed lines
#[test]
fn reports_are_deterministic_modulo_timestamps() {
    let strip = |text: String| -> String {
        text.lines()
            .filter(|l| !l.contains("timestamp_unix") && !l.contains("elapsed_ms"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    for args in [
        vec!["variance", "--field", "3", "--n", "2", "--m", "1", "--h", "1"],
        vec!["theorem-check", "--field", "3", "--n-max", "2"],
        vec!["ncount", "--field", "3", "--n", "2", "--m", "1", "--h", "1"],
        vec!["verify-all", "--field", "3", "--n-max", "1"],
    ] {
        let first = sumsq(&args);
        let second = sumsq(&args);
        assert_eq!(first.status.code(), Some(0));
        assert_eq!(
            strip(stdout_str(&first)),
            strip(stdout_str(&second)),
            "non-deterministic report for {:?}",
            args
        );
    }
}
