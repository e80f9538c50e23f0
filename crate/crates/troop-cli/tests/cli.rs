//! End-to-end tests of the `troop` binary: exit codes, output formats,
//! determinism, and config echo round-trips.

use std::path::PathBuf;
use std::process::{Command, Output};

fn troop() -> Command {
    Command::new(env!("CARGO_BIN_EXE_troop"))
}

fn temp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("troop-test-{}-{name}", std::process::id()));
    p
}

fn write_config(name: &str, text: &str) -> PathBuf {
    let path = temp_path(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

#[test]
fn characterize_defaults_reports_anisotropy_two() {
    let out = run(troop().arg("characterize"));
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let ratio = json["k_zz_over_k_xx"].as_f64().unwrap();
    assert!((ratio - 2.0).abs() < 0.05, "K_zz/K_xx = {ratio}");
    assert!(json["f0"].as_f64().unwrap() > 0.0);
    assert!(json["earnshaw_trace"].as_f64().unwrap().abs() < 1e-4 * json["stiffness"][2][2].as_f64().unwrap());
}

#[test]
fn empty_scan_range_is_a_validation_error() {
    let out = run(troop()
        .args(["scan", "--delta-from", "-2", "--delta-to", "-1", "--delta-steps", "0"]));
    assert_eq!(out.status.code(), Some(1));
    let out = run(troop()
        .args(["scan", "--delta-from", "-2", "--delta-to", "-1", "--omega", ""]));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn scan_writes_csv_with_header() {
    let path = temp_path("scan.csv");
    let out = run(troop().args([
        "scan",
        "--delta-from",
        "-2.5",
        "--delta-to",
        "-1.5",
        "--delta-steps",
        "3",
        "--omega",
        "0.8",
        "--temperature",
        "1.25e-4",
        "--output",
        path.to_str().unwrap(),
    ]));
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "delta_over_gamma,omega_over_gamma,k_xx,k_yy,k_zz,mu_xi,mu_z,temperature,radius_xy,radius_z,error"
    );
    assert_eq!(lines.count(), 3);
    std::fs::remove_file(&path).ok();
}

#[test]
fn simulate_same_seed_is_byte_identical() {
    let config = write_config(
        "sim.toml",
        "[sim]\nn_atoms = 8\nn_steps = 20000\ndt = 3.0e-8\ninit_position_sigma = 2.0e-4\ninit_velocity_sigma = 0.1\n",
    );
    let out_a = temp_path("sim-a.json");
    let out_b = temp_path("sim-b.json");
    for (out_path, _) in [(&out_a, 0), (&out_b, 1)] {
        let out = run(troop().args([
            "--config",
            config.to_str().unwrap(),
            "simulate",
            "--seed",
            "7",
            "--stats-out",
            out_path.to_str().unwrap(),
        ]));
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    assert!(!a.is_empty() && a == b, "simulate outputs must be byte-identical");
    for p in [config, out_a, out_b] {
        std::fs::remove_file(p).ok();
    }
}

#[test]
fn pump_dumps_exact_line_table() {
    let out = run(troop().args(["pump", "--dump-lines"]));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "m,q,numerator,denominator");
    // cycling line and the weakest line of the J=4 table
    assert!(text.contains("-4,-1,1,1"));
    assert!(text.contains("-4,1,1,45"));
    assert!(text.contains("-4,0,1,5"));
}

#[test]
fn pump_prints_normalized_populations() {
    let out = run(troop().args(["pump", "--at", "0,0,0.00035", "--v", "0,0,0"]));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut sum = 0.0;
    for line in text.lines().skip(2) {
        let value: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(value >= 0.0);
        sum += value;
    }
    assert!((sum - 1.0).abs() < 1e-9, "populations sum to {sum}");
}

#[test]
fn j_zero_config_is_rejected_with_message() {
    let config = write_config("j0.toml", "[transition]\njg = 0\n");
    let out = run(troop().args(["--config", config.to_str().unwrap(), "characterize"]));
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("J_g ≥ 1/2"), "stderr: {stderr}");
    std::fs::remove_file(config).ok();
}

#[test]
fn echo_config_round_trips() {
    let config = write_config(
        "echo-in.toml",
        "[geometry]\nfocus_distance = 0.02\n[operating_point]\nrabi_over_gamma = 1.0\n[sim]\nn_atoms = 4\nn_steps = 100\n",
    );
    let echo1 = temp_path("echo-1.toml");
    let echo2 = temp_path("echo-2.toml");
    let out = run(troop().args([
        "--config",
        config.to_str().unwrap(),
        "--echo-config",
        echo1.to_str().unwrap(),
        "pump",
        "--dump-lines",
    ]));
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let out = run(troop().args([
        "--config",
        echo1.to_str().unwrap(),
        "--echo-config",
        echo2.to_str().unwrap(),
        "pump",
        "--dump-lines",
    ]));
    assert!(out.status.success());
    let first = std::fs::read(&echo1).unwrap();
    let second = std::fs::read(&echo2).unwrap();
    assert!(!first.is_empty() && first == second, "echoed config must be a fixed point");
    for p in [config, echo1, echo2] {
        std::fs::remove_file(p).ok();
    }
}

#[test]
fn field_csv_center_is_natural_light() {
    let out = run(troop().args([
        "field",
        "--axis",
        "z",
        "--min",
        "-0.001",
        "--max",
        "0.001",
        "--count",
        "3",
        "--quant-axis",
        "z",
    ]));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "x,y,z,I_sigma_plus,I_sigma_minus,I_pi,axis_x,axis_y,axis_z"
    );
    let center: Vec<f64> = lines
        .nth(1)
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    // equal σ+, σ−, π intensities at the center
    assert!((center[3] - center[4]).abs() < 1e-12);
    assert!((center[3] - center[5]).abs() < 1e-12);
}

#[test]
fn field_force_mode_shows_restoring_force() {
    let out = run(troop().args([
        "field", "--force", "--axis", "z", "--min", "-0.0005", "--max", "0.0005", "--count", "3",
    ]));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    // Fz has the opposite sign of z away from the center.
    assert!(rows[0][5] > 0.0, "row {:?}", rows[0]);
    assert!(rows[2][5] < 0.0, "row {:?}", rows[2]);
    assert!(rows.iter().all(|r| r[6] > 0.0), "scattering rate positive");
}

#[test]
fn threads_env_is_validated() {
    let out = run(troop().env("TROOP_THREADS", "zebra").arg("characterize"));
    assert_eq!(out.status.code(), Some(1));
    let out = run(troop().env("TROOP_THREADS", "1").arg("characterize"));
    assert!(out.status.success());
}
