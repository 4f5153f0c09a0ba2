//! End-to-end CLI behavior: exit codes, schema validation, output formats.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_uncbench"))
}

fn write_temp(name: &str, content: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("uncbench-cli-tests");
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    fs::write(&path, content).unwrap();
    path
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process exited")
}

const GROUND_SPEC: &str = r#"{
  "model": "oscillator",
  "params": {"n_trunc": 16, "hbar": 1.0},
  "state": {"type": "fock", "k": 0},
  "pair": ["e_kin", "x"]
}"#;

#[test]
fn report_ground_state_succeeds() {
    let spec = write_temp("ground.json", GROUND_SPEC);
    let out = bin().arg("report").arg(&spec).output().unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let record: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(record["schema_version"], 1);
    let bounds = record["report"]["bounds"].as_array().unwrap();
    let refined = bounds.iter().find(|b| b["id"] == "refined").unwrap();
    assert_eq!(refined["saturated"], true);
    let robertson = bounds.iter().find(|b| b["id"] == "robertson").unwrap();
    assert!((robertson["margin"].as_f64().unwrap() - 1.0 / 16.0).abs() < 1e-9);
    assert_eq!(robertson["rhs"].as_f64().unwrap(), 0.0);
}

#[test]
fn report_spin_up_triple_saturated() {
    let spec = write_temp(
        "spin_up.json",
        r#"{
          "model": "spin",
          "params": {"j": 0.5},
          "state": {"type": "bloch", "theta": 0.0, "phi": 0.0},
          "pair": ["l_x", "l_y"]
        }"#,
    );
    let out = bin().arg("report").arg(&spec).output().unwrap();
    assert_eq!(code(&out), 0);
    let record: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let bounds = record["report"]["bounds"].as_array().unwrap();
    for id in ["robertson", "triple"] {
        let b = bounds.iter().find(|b| b["id"] == id).unwrap();
        assert_eq!(b["saturated"], true, "{id} not saturated");
    }
    let triple = bounds.iter().find(|b| b["id"] == "triple").unwrap();
    assert!((triple["lhs"].as_f64().unwrap() - 1.0 / 64.0).abs() < 1e-12);
}

#[test]
fn report_unknown_pair_exits_2() {
    let spec = write_temp(
        "bad_pair.json",
        r#"{
          "model": "oscillator",
          "state": {"type": "fock", "k": 0},
          "pair": ["e_kin", "y"]
        }"#,
    );
    let out = bin().arg("report").arg(&spec).output().unwrap();
    assert_eq!(code(&out), 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("y"), "stderr should name the operator: {stderr}");
}

#[test]
fn report_negative_tolerance_exits_2() {
    let spec = write_temp(
        "bad_tol.json",
        r#"{
          "model": "oscillator",
          "state": {"type": "fock", "k": 0},
          "pair": ["e_kin", "x"],
          "tolerances": {"saturation": -1.0}
        }"#,
    );
    let out = bin().arg("report").arg(&spec).output().unwrap();
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("saturation"));
}

#[test]
fn report_wrong_schema_version_exits_2() {
    let spec = write_temp(
        "bad_version.json",
        r#"{
          "schema_version": 99,
          "model": "oscillator",
          "state": {"type": "fock", "k": 0},
          "pair": ["e_kin", "x"]
        }"#,
    );
    let out = bin().arg("report").arg(&spec).output().unwrap();
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema_version"));
}

#[test]
fn report_unknown_field_exits_2() {
    let spec = write_temp(
        "unknown_field.json",
        r#"{
          "model": "oscillator",
          "state": {"type": "fock", "k": 0},
          "pair": ["e_kin", "x"],
          "extra": 1
        }"#,
    );
    let out = bin().arg("report").arg(&spec).output().unwrap();
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("extra"));
}

#[test]
fn report_unknown_evaluate_id_exits_2() {
    let spec = write_temp(
        "bad_evaluate.json",
        r#"{
          "model": "oscillator",
          "state": {"type": "fock", "k": 0},
          "pair": ["e_kin", "x"],
          "evaluate": ["robertson", "nonsense"]
        }"#,
    );
    let out = bin().arg("report").arg(&spec).output().unwrap();
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("nonsense"));
}

#[test]
fn tol_scale_env_validation() {
    let spec = write_temp("ground2.json", GROUND_SPEC);
    let out = bin()
        .arg("report")
        .arg(&spec)
        .env("UNCBENCH_TOL_SCALE", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("UNCBENCH_TOL_SCALE"));

    let out = bin()
        .arg("report")
        .arg(&spec)
        .env("UNCBENCH_TOL_SCALE", "2.0")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
}

#[test]
fn sweep_zero_step_exits_2() {
    let spec = write_temp(
        "sweep_zero.json",
        r#"{
          "scenario": {
            "model": "spin",
            "params": {"j": 0.5},
            "state": {"type": "bloch", "theta": 0.0, "phi": 0.0},
            "pair": ["l_x", "l_y"]
          },
          "sweep": {"parameter": "theta", "start": 0.0, "stop": 1.0, "step": 0.0}
        }"#,
    );
    let out_path = std::env::temp_dir().join("uncbench-cli-tests/zero.csv");
    let out = bin()
        .arg("sweep")
        .arg(&spec)
        .arg("-o")
        .arg(&out_path)
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("step"));
}

#[test]
fn sweep_bloch_theta_row_count_and_minimum() {
    let spec = write_temp(
        "sweep_bloch.json",
        r#"{
          "scenario": {
            "model": "spin",
            "params": {"j": 0.5},
            "state": {"type": "bloch", "theta": 0.0, "phi": 0.0},
            "pair": ["l_x", "l_y"],
            "evaluate": ["triple"]
          },
          "sweep": {"parameter": "theta", "start": 0.0, "stop": 3.141592653589793,
                    "step": 0.04908738521234052}
        }"#,
    );
    let out_path = std::env::temp_dir().join("uncbench-cli-tests/bloch.csv");
    let out = bin()
        .arg("sweep")
        .arg(&spec)
        .arg("-o")
        .arg(&out_path)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(&out_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "param,lhs,rhs,margin,inequality");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 65);
    // locale-independent formatting: decimal points, no commas in numbers
    assert!(rows[1].split(',').count() == 5);
    let min_row = rows
        .iter()
        .map(|r| {
            let cols: Vec<&str> = r.split(',').collect();
            (cols[0].parse::<f64>().unwrap(), cols[3].parse::<f64>().unwrap())
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    assert!((min_row.1 + 1.0 / 256.0).abs() <= 1e-9, "margin {}", min_row.1);
    assert!((min_row.0 - std::f64::consts::FRAC_PI_4).abs() <= 1e-9);
}

#[test]
fn search_unknown_inequality_exits_2() {
    let spec = write_temp(
        "search_bad_ineq.json",
        r#"{
          "search": "violation",
          "family": {"id": "bloch_theta", "theta_min": 0.0, "theta_max": 3.14},
          "inequality": "made_up"
        }"#,
    );
    let out = bin().arg("search").arg(&spec).arg("--seed").arg("1").output().unwrap();
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("made_up"));
}

#[test]
fn search_unknown_family_exits_2() {
    let spec = write_temp(
        "search_bad_family.json",
        r#"{
          "search": "violation",
          "family": {"id": "mystery", "lo": 0.0, "hi": 1.0},
          "inequality": "triple"
        }"#,
    );
    let out = bin().arg("search").arg(&spec).arg("--seed").arg("1").output().unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn search_requires_seed() {
    let spec = write_temp(
        "search_no_seed.json",
        r#"{
          "search": "violation",
          "family": {"id": "bloch_theta", "theta_min": 0.0, "theta_max": 3.14},
          "inequality": "triple"
        }"#,
    );
    let out = bin().arg("search").arg(&spec).output().unwrap();
    assert_ne!(code(&out), 0);
}

#[test]
fn search_violation_exit_codes_and_status() {
    let triple = write_temp(
        "search_triple.json",
        r#"{
          "search": "violation",
          "family": {"id": "bloch_theta", "theta_min": 0.0, "theta_max": 3.141592653589793},
          "inequality": "triple"
        }"#,
    );
    let out = bin().arg("search").arg(&triple).arg("--seed").arg("9").output().unwrap();
    assert_eq!(code(&out), 1);
    let record: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(record["status"], "violation_certified");
    assert!(record["result"]["best_value"].as_f64().unwrap() < 0.0);

    let robertson = write_temp(
        "search_robertson.json",
        r#"{
          "search": "violation",
          "family": {"id": "bloch_theta", "theta_min": 0.0, "theta_max": 3.141592653589793},
          "inequality": "robertson"
        }"#,
    );
    let out = bin().arg("search").arg(&robertson).arg("--seed").arg("9").output().unwrap();
    assert_eq!(code(&out), 0);
    let record: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(record["status"], "no_violation");
}

#[test]
fn search_saturation_completes() {
    let spec = write_temp(
        "search_sat.json",
        r#"{
          "search": "saturation",
          "model": "spin",
          "params": {"j": 0.5},
          "pair": ["l_x", "l_y"],
          "multi_start": 1
        }"#,
    );
    let out = bin().arg("search").arg(&spec).arg("--seed").arg("3").output().unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let record: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(record["status"], "completed");
    assert!(record["result"]["best_value"].as_f64().unwrap() <= 1e-8);
    assert!(record["result"]["gamma"].is_array());
    assert!(record["result"]["spinor"].is_array());
}

#[test]
fn scenario_schema_round_trips() {
    let spec = write_temp("round.json", GROUND_SPEC);
    let out = bin().arg("report").arg(&spec).output().unwrap();
    let record: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // parse → serialize → parse is identity on the embedded spec
    let spec_value = &record["spec"];
    let text = serde_json::to_string(spec_value).unwrap();
    let reparsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(*spec_value, reparsed);
}

#[test]
fn run_record_round_trips_typed() {
    let spec = write_temp("round_typed.json", GROUND_SPEC);
    let out = bin().arg("report").arg(&spec).output().unwrap();
    let record: uncbench::records::RunRecord = serde_json::from_slice(&out.stdout).unwrap();
    let text = serde_json::to_string(&record).unwrap();
    let again: uncbench::records::RunRecord = serde_json::from_str(&text).unwrap();
    let v1: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let v2: serde_json::Value = serde_json::to_value(&again).unwrap();
    assert_eq!(v1, v2);
}

#[test]
fn sweep_coherent_kinetic_margin_decreases() {
    let spec = write_temp(
        "sweep_coherent.json",
        r#"{
          "scenario": {
            "model": "oscillator",
            "params": {"n_trunc": 48},
            "state": {"type": "coherent", "re": 0.0, "im": 0.0},
            "pair": ["e_kin", "x"],
            "evaluate": ["kinetic_position"]
          },
          "sweep": {"parameter": "im", "start": 0.0, "stop": 1.5, "step": 0.125}
        }"#,
    );
    let out_path = std::env::temp_dir().join("uncbench-cli-tests/coherent.csv");
    let out = bin()
        .arg("sweep")
        .arg(&spec)
        .arg("-o")
        .arg(&out_path)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(&out_path).unwrap();
    let margins: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|r| r.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert_eq!(margins.len(), 13);
    assert!(margins[0].abs() <= 1e-9, "saturated at alpha=0: {}", margins[0]);
    for pair in margins.windows(2) {
        assert!(pair[1] < pair[0] + 1e-12, "margin not decreasing: {pair:?}");
    }
}

#[test]
fn selftest_bad_tolerance_scale_exits_2() {
    let out = bin()
        .arg("selftest")
        .env("UNCBENCH_TOL_SCALE", "-3")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}
