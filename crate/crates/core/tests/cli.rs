//! End-to-end checks of the command-line interface: exit codes, report and
//! series files, and bit-identical reruns.

use std::path::PathBuf;
use std::process::Command;

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rindler-sim"))
}

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rindler-sim-test-{}-{tag}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn run_writes_deterministic_reports_and_exits_zero() {
    let dir = scratch_dir("run");
    let config_path = dir.join("single.json");
    std::fs::write(
        &config_path,
        r#"{"schema":1,"scenario":"single-chain","gamma":0.3,"g":1.0,"tau_grid":{"points":9}}"#,
    )
    .unwrap();

    let mut outputs = Vec::new();
    for pass in ["first", "second"] {
        let out_dir = dir.join(pass);
        let status = binary()
            .args(["run"])
            .arg(&config_path)
            .arg("--out-dir")
            .arg(&out_dir)
            .status()
            .unwrap();
        assert!(status.success());
        let report = std::fs::read(out_dir.join("single.report.json")).unwrap();
        let series = std::fs::read(out_dir.join("single.series.csv")).unwrap();
        outputs.push((report, series));
    }
    assert_eq!(outputs[0].0, outputs[1].0, "report files differ between runs");
    assert_eq!(outputs[0].1, outputs[1].1, "series files differ between runs");

    let text = String::from_utf8(outputs[0].0.clone()).unwrap();
    assert!(text.contains("\"passed\": true"));
    assert!(!text.contains("wall_clock"));
    let series = String::from_utf8(outputs[0].1.clone()).unwrap();
    assert!(series.starts_with("tau,n_sigma,n_b1,overlap,entropy_field,entropy_chains,leakage"));
    assert_eq!(series.lines().count(), 10);

    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn infeasible_config_fails_with_refusal() {
    let dir = scratch_dir("refusal");
    let config_path = dir.join("too-big.json");
    std::fs::write(
        &config_path,
        r#"{"schema":1,"scenario":"single-chain","gamma":0.99}"#,
    )
    .unwrap();
    let out_dir = dir.join("out");
    let output = binary()
        .args(["run"])
        .arg(&config_path)
        .arg("--out-dir")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let report =
        std::fs::read_to_string(out_dir.join("too-big.report.json")).unwrap();
    assert!(report.contains("refusal"));
    assert!(report.contains("budget"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn sweep_runs_configs_in_order() {
    let dir = scratch_dir("sweep");
    let configs = dir.join("configs");
    std::fs::create_dir_all(&configs).unwrap();
    std::fs::write(
        configs.join("a_single.json"),
        r#"{"schema":1,"scenario":"single-chain","gamma":0.1,"tau_grid":{"points":5}}"#,
    )
    .unwrap();
    std::fs::write(
        configs.join("b_classical.json"),
        r#"{"schema":1,"scenario":"classical"}"#,
    )
    .unwrap();
    let out_dir = dir.join("out");
    let output = binary()
        .args(["sweep"])
        .arg(&configs)
        .arg("--out-dir")
        .arg(&out_dir)
        .env("RINDLER_SIM_THREADS", "2")
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    assert!(out_dir.join("a_single.report.json").exists());
    assert!(out_dir.join("b_classical.report.json").exists());
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("sweep: 2/2 runs passed"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn verify_identities_prints_table_and_json() {
    let dir = scratch_dir("identities");
    let json_path = dir.join("identities.json");
    let output = binary()
        .args(["verify-identities", "--json"])
        .arg(&json_path)
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("pair-shift-b1"));
    assert!(stdout.contains("0 failed"));
    let payload = std::fs::read_to_string(&json_path).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&payload).unwrap();
    assert!(parsed.as_array().is_some_and(|a| !a.is_empty()));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn classical_scan_and_coupling_report_emit_csv() {
    let output = binary()
        .args([
            "classical-scan",
            "--omega",
            "1.0",
            "--epsilon",
            "0.1",
            "--kmin",
            "0.5",
            "--kmax",
            "1.5",
            "--points",
            "11",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.starts_with("k,nu_plus,nu_minus,rabi,max_psi_sq"));
    assert_eq!(stdout.lines().count(), 12);

    let dir = scratch_dir("coupling");
    let csv_path = dir.join("coupling.csv");
    let output = binary()
        .args(["coupling-report", "--oscillators", "64", "--out"])
        .arg(&csv_path)
        .output()
        .unwrap();
    assert!(output.status.success());
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("dominance"), "{stderr}");
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("omega\\k,"));
    // header + five Omega rows
    assert_eq!(csv.lines().count(), 6);
    let _ = std::fs::remove_dir_all(&dir);
}
