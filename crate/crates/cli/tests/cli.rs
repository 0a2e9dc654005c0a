use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn phase_avg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phase-avg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn small_spring_sweep(out: &Path, workers: &str) -> Output {
    phase_avg(&[
        "sweep",
        "--model",
        "spring",
        "--method",
        "mc-classical",
        "--rho",
        "1.7",
        "--dt",
        "0.5",
        "--t-max",
        "20",
        "--zeta-start",
        "0.5",
        "--zeta-stop",
        "1.5",
        "--no-timing",
        "--workers",
        workers,
        "--out",
        out.to_str().unwrap(),
    ])
}

#[test]
fn dry_run_echoes_config_without_writing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never");
    let o = phase_avg(&["sweep", "--model", "kg", "--method", "pa", "--eps", "0.05", "--dry-run", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["model"], "kg");
    assert_eq!(v[0]["method"], "phase_averaged");
    assert_eq!(v[0]["eps"], 0.05);
    assert_eq!(v[0]["dt"], serde_json::json!([1.0, 2.0, 3.0]));
    assert!(!out.exists());
}

#[test]
fn preset_dry_run_lists_every_sweep() {
    let o = phase_avg(&["preset", "spring", "--dry-run"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 12);
}

#[test]
fn slow_rswe_needs_opt_in() {
    let o = phase_avg(&["sweep", "--model", "rswe", "--method", "mc-local", "--eps", "0.001", "--dry-run"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("--include-slow"));
    let o = phase_avg(&["sweep", "--model", "rswe", "--method", "mc-local", "--eps", "0.001", "--dry-run", "--include-slow"]);
    assert!(o.status.success());
    let o = phase_avg(&["preset", "rswe", "--dry-run", "--include-slow"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 4);
}

#[test]
fn invalid_input_fails_cleanly() {
    for args in [
        &["sweep", "--model", "spring", "--method", "rk"][..],
        &["sweep", "--model", "rswe", "--method", "mc-classical"][..],
        &["sweep", "--model", "kg", "--method", "pa", "--dt", "0.00015"][..],
        &["preset", "torus"][..],
        &["run", "/nonexistent/config.json"][..],
    ] {
        let o = phase_avg(args);
        assert!(!o.status.success(), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"), "{args:?}");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(small_spring_sweep(&a, "1").status.success());
    assert!(small_spring_sweep(&b, "3").status.success());
    let csv_a = fs::read(a.join("results.csv")).unwrap();
    assert_eq!(csv_a, fs::read(b.join("results.csv")).unwrap());
    assert_eq!(fs::read(a.join("results.json")).unwrap(), fs::read(b.join("results.json")).unwrap());

    let text = String::from_utf8(csv_a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "model,method,eps,rho,dt,zeta,eta,eta_C,K_s,K_r,error,wall_ms,status");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().all(|r| r.starts_with("spring,mc-classical,1,1.7,0.5,") && r.ends_with(",0,ok")));
}

#[test]
fn run_reads_config_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let config = dir.path().join("sweeps.json");
    fs::write(
        &config,
        serde_json::json!([
            {"model": "spring", "method": "pa", "rho": 2.0, "t_max": 10.0, "zeta_start": 1.0, "zeta_stop": 1.0},
            {"model": "spring", "method": "mean_corrected_local", "rho": 2.0, "t_max": 10.0,
             "zeta_start": 0.5, "zeta_stop": 1.0, "zeta_step": 0.5, "eta_c": {"kind": "sweep", "step": 0.5, "count": 3},
             "output": out.to_str().unwrap()}
        ])
        .to_string(),
    )
    .unwrap();
    let o = phase_avg(&["run", config.to_str().unwrap(), "--no-timing"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    // One fixed-window row, two phase-averaged selection rows and three correction windows.
    let csv = fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 1 + 2 + 3);
    let summary = String::from_utf8(o.stdout).unwrap();
    assert_eq!(summary.lines().count(), 3);
    let sidecar: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("results.json")).unwrap()).unwrap();
    assert_eq!(sidecar["selections"].as_array().unwrap().len(), 2);
    assert!(sidecar["selections"][1]["eta_c_star"].is_number());
}
