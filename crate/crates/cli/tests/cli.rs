//! End-to-end behavior of the `spinhiggs` binary: flags, exit codes,
//! output files and determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_spinhiggs")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("spinhiggs_cli_{name}"));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("spawn")
}

#[test]
fn dims_reports_torus_dimension_four() {
    let dir = tmp("dims");
    let out = run(&[
        "dims", "--type", "A1", "--genus", "1", "--marked", "1", "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.join("dims.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["groups"][0]["dim_m_v"], 4);
    assert_eq!(json["groups"][0]["dim_x_v"], 2);
    // report round-trips through parse without loss
    let reparsed = serde_json::to_string(&json).unwrap();
    let json2: serde_json::Value = serde_json::from_str(&reparsed).unwrap();
    assert_eq!(json, json2);
}

#[test]
fn dims_sphere_scaling() {
    for (n, want) in [(2u32, 2i64), (3, 6), (4, 10)] {
        let dir = tmp(&format!("dims_sphere_{n}"));
        let out = run(&[
            "dims", "--type", "A1", "--genus", "0", "--marked",
            &format!("{n}"), "--out-dir", dir.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        let text = std::fs::read_to_string(dir.join("dims.json")).unwrap();
        let json: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(json["groups"][0]["dim_m_v"], want);
    }
}

#[test]
fn spectrum_isotropic_spin_one() {
    let dir = tmp("spectrum");
    let out = run(&[
        "spectrum", "--l", "1", "--J", "1,1,1", "--out-dir", dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.join("spectrum.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    let eigs = json["eigenvalues"].as_array().unwrap();
    assert_eq!(eigs.len(), 3);
    for e in eigs {
        assert!((e[0].as_f64().unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(e[1].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn validation_errors_exit_one() {
    let out = run(&["simulate", "--model", "top", "--tau", "0,-1"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("curve.tau_im"), "stderr: {err}");

    let out = run(&["simulate", "--model", "gaudin", "--marks", "0,0"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("params.marks"), "stderr: {err}");

    let out = run(&["plot"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn numerical_failures_exit_two() {
    // explicit CM start sitting on the potential pole (u = 0)
    let dir = tmp("pole");
    std::fs::create_dir_all(&dir).unwrap();
    let config = dir.join("scenario.json");
    std::fs::write(
        &config,
        r#"{
  "action": "simulate",
  "model": "cm",
  "params": {"variant": "III"},
  "initial": {"v": 0.1, "u": 0.0,
              "spin": {"p": [0.0, 0.1, 0.0], "q": [1.0, 0.0, 0.0]}},
  "integrator": {"t_end": 0.5}
}"#,
    )
    .unwrap();
    let out = run(&[
        "simulate", "--config", config.to_str().unwrap(), "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn offshell_initial_state_is_a_validation_error() {
    let dir = tmp("offshell");
    std::fs::create_dir_all(&dir).unwrap();
    let config = dir.join("scenario.json");
    std::fs::write(
        &config,
        r#"{
  "action": "simulate",
  "model": "top",
  "params": {"j": [1.0, 2.0, 3.0]},
  "initial": {"p": [0.0, 0.1, 0.0], "q": [2.0, 0.0, 0.0]}
}"#,
    )
    .unwrap();
    let out = run(&[
        "simulate", "--config", config.to_str().unwrap(), "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn trajectory_csv_row_count_includes_t_zero() {
    let dir = tmp("rows");
    let out = run(&[
        "simulate", "--model", "top", "--J", "1,2,3", "--dt", "0.01", "--t-end",
        "0.03", "--out-dir", dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.join("trajectory.csv")).unwrap();
    let rows: Vec<&str> = csv.trim_end().lines().collect();
    // header plus 4 data rows (t = 0 included)
    assert_eq!(rows.len(), 5, "csv:\n{csv}");
    assert!(rows[0].starts_with("t,p0_re,p0_im"));
    assert!(rows[0].ends_with(",c1_abs,c2_abs,reality_residual,h2,h0"));
}

#[test]
fn manifest_records_calibration_constants() {
    let dir = tmp("manifest");
    let out = run(&[
        "simulate", "--model", "top", "--J", "1,2,3", "--dt", "0.01", "--t-end",
        "0.02", "--out-dir", dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.join("manifest.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    let cal = &json["calibration"];
    assert_eq!(cal["lax_axis_phi"], serde_json::json!([3, 2, 1]));
    assert_eq!(cal["x2_factor"], "i");
    assert_eq!(cal["trace_wp_coeff"], 2.0);
    assert_eq!(cal["trace_const_coeff"], 2.0);
    assert_eq!(cal["cm_coupling"], -0.5);
    assert_eq!(cal["gaudin_h2_coeff"], 1.0);
    assert_eq!(cal["gaudin_h1_coeff"], -2.0);
    assert_eq!(json["dt"], 0.01);
}

#[test]
fn repeated_runs_are_bit_identical() {
    let dir_a = tmp("det_a");
    let dir_b = tmp("det_b");
    for dir in [&dir_a, &dir_b] {
        let out = run(&[
            "simulate", "--model", "gaudin", "--marks", "0,1.3,2.6", "--t-end",
            "0.5", "--seed", "11", "--out-dir", dir.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let a = std::fs::read(dir_a.join("trajectory.csv")).unwrap();
    let b = std::fs::read(dir_b.join("trajectory.csv")).unwrap();
    assert_eq!(a, b, "trajectory CSV differs between identical runs");
    let a = std::fs::read(dir_a.join("conservation.json")).unwrap();
    let b = std::fs::read(dir_b.join("conservation.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn seed_env_var_overrides_config() {
    let dir_a = tmp("env_a");
    let dir_b = tmp("env_b");
    let out = Command::new(bin())
        .args([
            "simulate", "--model", "top", "--J", "1.1,0.4,-0.6", "--t-end", "0.2",
            "--dt", "0.01", "--seed", "3", "--out-dir", dir_a.to_str().unwrap(),
        ])
        .env("SPINHIGGS_SEED", "99")
        .output()
        .unwrap();
    assert!(out.status.success());
    let out = run(&[
        "simulate", "--model", "top", "--J", "1.1,0.4,-0.6", "--t-end", "0.2",
        "--dt", "0.01", "--seed", "99", "--out-dir", dir_b.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let a = std::fs::read(dir_a.join("trajectory.csv")).unwrap();
    let b = std::fs::read(dir_b.join("trajectory.csv")).unwrap();
    assert_eq!(a, b, "env-var seed should select the same initial state");
}

#[test]
fn check_subcommand_reports_pass_lines() {
    let dir = tmp("check");
    let out = run(&["check", "--seed", "3", "--out-dir", dir.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    for id in 1..=9 {
        assert!(
            stdout.contains(&format!("criterion {id}:")),
            "missing line for criterion {id}:\n{stdout}"
        );
    }
    assert!(stdout.contains("all criteria passed"));
}
