//! End-to-end checks of the command-line interface: exit codes, report
//! shape, and the config round-trip through exported fixtures.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_halflight"))
        .args(args)
        .env_remove("HALFLIGHT_TOL")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("halflight_cli_{}_{name}", std::process::id()));
    fs::write(&path, contents).expect("write temp file");
    path
}

#[test]
fn analyze_example1_reports_homothetic_factor() {
    let out = run(&[
        "analyze",
        "--fixture",
        "example1",
        "--points",
        "2",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["pass"], true);
    let cls = &doc["classification"];
    assert!((cls["phi"].as_f64().unwrap() - 0.5).abs() < 1e-6);
    assert_eq!(cls["screen_homothetic"], true);
}

#[test]
fn analyze_plane_is_totally_geodesic() {
    let out = run(&["analyze", "--fixture", "plane", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["classification"]["totally_geodesic"], true);
}

#[test]
fn verify_example2_passes() {
    let out = run(&["verify", "--fixture", "example2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("coscreen_killing"));
    assert!(text.contains("verify example2: PASS"));
}

#[test]
fn verify_example3_expects_not_homothetic() {
    let out = run(&["verify", "--fixture", "example3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("not applicable: not screen homothetic"));
}

#[test]
fn impossible_tolerance_fails_fd_residuals() {
    let out = run(&[
        "verify",
        "--fixture",
        "example1",
        "--tol",
        "1e-15",
        "--points",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("FAIL"));
}

#[test]
fn analyze_exit_zero_even_when_residuals_fail() {
    let out = run(&[
        "analyze",
        "--fixture",
        "example1",
        "--tol",
        "1e-15",
        "--points",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["pass"], false);
}

#[test]
fn env_var_sets_uniform_tolerance() {
    let out = Command::new(env!("CARGO_BIN_EXE_halflight"))
        .args(["analyze", "--fixture", "example1", "--points", "1", "--format", "json"])
        .env("HALFLIGHT_TOL", "1e-15")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["pass"], false);
    assert_eq!(doc["tolerances"]["one_fd"].as_f64(), Some(1e-15));
}

#[test]
fn unknown_fixture_is_input_error() {
    let out = run(&["analyze", "--fixture", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("unknown fixture"));
    assert!(err.contains("example1"));
}

#[test]
fn unknown_suite_is_input_error() {
    let out = run(&["analyze", "--fixture", "plane", "--suite", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_expression_is_input_error() {
    let config = temp_file(
        "badexpr.json",
        r#"{"spec": {"name": "bad", "chart_dim": 2,
            "components": ["v1", "v2", "tan(v1)", "0"],
            "domain": [[-1.0, 1.0], [-1.0, 1.0]]}}"#,
    );
    let out = run(&["analyze", "--config", config.to_str().unwrap()]);
    fs::remove_file(&config).ok();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("tan"));
}

#[test]
fn nondegenerate_immersion_is_geometry_error() {
    let config = temp_file(
        "riemannian.json",
        r#"{"spec": {"name": "riemannian", "chart_dim": 2,
            "components": ["v1", "v2", "0", "0"],
            "domain": [[-1.0, 1.0], [-1.0, 1.0]]}}"#,
    );
    let out = run(&["analyze", "--config", config.to_str().unwrap()]);
    fs::remove_file(&config).ok();
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("radical"));
}

#[test]
fn nonzero_ambient_curvature_is_rejected() {
    let config = temp_file(
        "curved.json",
        r#"{"spec": {"name": "curved", "chart_dim": 2,
            "components": ["v1", "v1", "v2", "1"],
            "domain": [[1.0, 2.0], [-1.0, 1.0]]},
            "k": 1.0}"#,
    );
    let out = run(&["analyze", "--config", config.to_str().unwrap()]);
    fs::remove_file(&config).ok();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("arithmetic"));
}

#[test]
fn export_round_trips_through_analyze() {
    let path = std::env::temp_dir().join(format!(
        "halflight_cli_{}_export.json",
        std::process::id()
    ));
    let out = run(&[
        "export",
        "--fixture",
        "null_cone",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&[
        "analyze",
        "--config",
        path.to_str().unwrap(),
        "--points",
        "2",
        "--format",
        "json",
    ]);
    fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["pass"], true);
    assert_eq!(doc["spec_name"], "null_cone");
}

#[test]
fn fixtures_lists_registry() {
    let out = run(&["fixtures"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for name in [
        "example1",
        "example2",
        "example3",
        "plane",
        "null_cone",
        "null_cone_cylinder",
        "example1_rescaled",
        "example1_twisted",
    ] {
        assert!(text.contains(name), "missing {name}");
    }
}

#[test]
fn suite_filter_limits_report() {
    let out = run(&[
        "analyze",
        "--fixture",
        "plane",
        "--points",
        "1",
        "--suite",
        "frames",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    let suites = doc["points"][0]["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 1);
    assert_eq!(suites[0]["suite"], "frames");
    assert!(doc["classification"].is_null());
}

#[test]
fn text_and_json_carry_the_same_numbers() {
    let json_out = run(&[
        "analyze",
        "--fixture",
        "example2",
        "--points",
        "1",
        "--suite",
        "induced",
        "--format",
        "json",
    ]);
    let text_out = run(&[
        "analyze",
        "--fixture",
        "example2",
        "--points",
        "1",
        "--suite",
        "induced",
        "--format",
        "text",
    ]);
    assert_eq!(json_out.status.code(), Some(0));
    assert_eq!(text_out.status.code(), Some(0));
    let doc = stdout_json(&json_out);
    let text = String::from_utf8_lossy(&text_out.stdout);
    for item in doc["points"][0]["suites"][0]["items"].as_array().unwrap() {
        let name = item["name"].as_str().unwrap();
        let value = item["value"].as_f64().unwrap();
        assert!(text.contains(name), "text lacks {name}");
        let rendered = format!("{value:.3e}");
        assert!(
            text.contains(&rendered),
            "text lacks value {rendered} for {name}"
        );
    }
}
