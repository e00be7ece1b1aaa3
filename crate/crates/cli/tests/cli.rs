//! End-to-end tests of the `episcale` binary: output determinism, reference
//! values, diagnostics, and the exit-code contract.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_episcale"))
}

fn scenario_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    binary().args(args).output().expect("binary runs")
}

fn stdout_of(output: &Output) -> &str {
    std::str::from_utf8(&output.stdout).expect("stdout is UTF-8")
}

fn stderr_of(output: &Output) -> &str {
    std::str::from_utf8(&output.stderr).expect("stderr is UTF-8")
}

/// Writes a scenario derived from the two-patch reference file by literal
/// replacement, returning its path.
fn derived_scenario(label: &str, from: &str, to: &str) -> PathBuf {
    let base = fs::read_to_string(scenario_path("two_patch.toml")).unwrap();
    let patched = base.replace(from, to);
    assert_ne!(base, patched, "replacement {from:?} did not match");
    let path = Path::new(env!("CARGO_TARGET_TMPDIR")).join(format!("{label}.toml"));
    fs::write(&path, patched).unwrap();
    path
}

#[test]
fn r0_reports_the_reference_values() {
    let output = run(&["r0", scenario_path("two_patch.toml").to_str().unwrap()]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    let text = stdout_of(&output);
    let json: serde_json::Value =
        serde_json::from_str(text.strip_prefix("# r0.json\n").unwrap()).unwrap();
    let patches = json["patches"].as_array().unwrap();
    let closed: Vec<f64> = patches
        .iter()
        .map(|p| p["closed_form"].as_f64().unwrap())
        .collect();
    assert!((closed[0] - 1.5372918978912318).abs() < 1e-9);
    assert!((closed[1] - 1.0293925626658575).abs() < 1e-9);
    for p in patches {
        let gap =
            (p["closed_form"].as_f64().unwrap() - p["next_generation"].as_f64().unwrap()).abs();
        assert!(gap < 1e-10);
    }
    let aggregated = json["aggregated"].as_f64().unwrap();
    assert!((aggregated - 0.9793365267704164).abs() < 1e-12);
}

#[test]
fn single_patch_scenario_reports_no_aggregation() {
    let output = run(&["r0", scenario_path("single_patch.toml").to_str().unwrap()]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    let json: serde_json::Value =
        serde_json::from_str(stdout_of(&output).strip_prefix("# r0.json\n").unwrap()).unwrap();
    assert!(json["aggregated"].is_null());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let scenario = scenario_path("two_patch.toml");
    let scenario = scenario.to_str().unwrap();
    for args in [
        vec!["r0", scenario],
        vec!["reduce", scenario],
        vec!["classify", scenario],
        vec!["region", scenario, "--resolution", "41"],
        vec!["verify-k", scenario, "--ks", "1,8,64"],
    ] {
        let first = run(&args);
        let second = run(&args);
        assert!(first.status.success(), "{}", stderr_of(&first));
        assert_eq!(first.stdout, second.stdout, "args {args:?}");
    }
}

#[test]
fn worker_count_does_not_change_verify_k_output() {
    let scenario = scenario_path("two_patch.toml");
    let scenario = scenario.to_str().unwrap();
    let serial = run(&["verify-k", scenario, "--ks", "1,2,4,8", "--workers", "1"]);
    let parallel = run(&["verify-k", scenario, "--ks", "8,4,2,1", "--workers", "4"]);
    assert!(serial.status.success(), "{}", stderr_of(&serial));
    assert_eq!(serial.stdout, parallel.stdout);
}

#[test]
fn out_directory_receives_the_documents() {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("region_out");
    let _ = fs::remove_dir_all(&dir);
    let output = run(&[
        "region",
        scenario_path("two_patch.toml").to_str().unwrap(),
        "--resolution",
        "11",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    assert!(stdout_of(&output).is_empty());
    for name in ["region.csv", "region_boundary.csv", "region_summary.json"] {
        assert!(dir.join(name).is_file(), "{name} missing");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("region_summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["feasibility"]["verdict"], "under-line");
}

#[test]
fn classify_agrees_with_the_reference_story() {
    let output = run(&[
        "classify",
        scenario_path("two_patch.toml").to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    let json: serde_json::Value = serde_json::from_str(
        stdout_of(&output)
            .strip_prefix("# classify.json\n")
            .unwrap(),
    )
    .unwrap();
    assert_eq!(json["coupled"]["verdict"], "eradication");
    for isolated in json["isolated"].as_array().unwrap() {
        assert_eq!(isolated["verdict"], "persistence");
    }
}

#[test]
fn simulate_trajectory_has_header_and_final_step() {
    let scenario = derived_scenario("short_horizon", "horizon = 5000", "horizon = 12");
    let output = run(&["simulate", scenario.to_str().unwrap()]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    let lines: Vec<&str> = stdout_of(&output).lines().collect();
    assert_eq!(lines[0], "# trajectory.csv");
    assert_eq!(lines[1], "step,s1,s2,e1,e2,i1,i2,r1,r2,total,infected");
    assert_eq!(lines.len(), 2 + 13, "one row per step plus the initial row");
    assert!(lines.last().unwrap().starts_with("12,"));
}

#[test]
fn wrong_convention_marker_is_rejected_with_exit_one() {
    let scenario = derived_scenario(
        "bad_convention",
        "convention = \"column-stochastic\"",
        "convention = \"row-stochastic\"",
    );
    let output = run(&["validate", scenario.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr_of(&output).contains("column-stochastic"));
}

#[test]
fn bad_column_sum_is_rejected_with_exit_one_and_a_location() {
    let scenario = derived_scenario(
        "bad_column",
        "i = [[0.901, 0.001], [0.099, 0.999]]",
        "i = [[0.901, 0.001], [0.199, 0.999]]",
    );
    let output = run(&["validate", scenario.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    let message = stderr_of(&output);
    assert!(message.contains("movement"), "{message}");
    assert!(message.contains("column 0 sums to"), "{message}");
}

#[test]
fn unknown_scenario_fields_are_rejected_with_exit_one() {
    let scenario = derived_scenario("typo_field", "horizon = 5000", "horizonn = 5000");
    let output = run(&["validate", scenario.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr_of(&output).contains("horizonn"));
}

#[test]
fn subcritical_patches_fail_the_region_precondition_with_exit_two() {
    let scenario = derived_scenario(
        "subcritical",
        "transmission = { kind = \"standard\", beta = 0.95 }",
        "transmission = { kind = \"standard\", beta = 0.1 }",
    );
    let output = run(&["region", scenario.to_str().unwrap(), "--resolution", "5"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn missing_scenario_file_exits_one() {
    let output = run(&["validate", "/nonexistent/nowhere.toml"]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn help_exits_zero_and_usage_errors_exit_one() {
    let help = run(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout_of(&help).contains("episcale"));

    let unknown = run(&["frobnicate"]);
    assert_eq!(unknown.status.code(), Some(1));
}
