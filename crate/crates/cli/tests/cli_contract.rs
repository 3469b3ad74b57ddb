//! Contract tests for the command-line surface: exit codes, file formats,
//! schema strictness, and byte-determinism of written outputs.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_isospec"))
}

fn write_cfg(dir: &std::path::Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn tmpdir(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("isospec-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn exit_zero_on_passing_run() {
    let dir = tmpdir("pass");
    let cfg = write_cfg(
        &dir,
        "cfg.json",
        r#"{"schema": 1, "command": "verify-family", "family": "so5", "t_values": [0.0, 0.2], "seed": 3}"#,
    );
    let out = bin()
        .args(["verify-family", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = std::fs::read_to_string(dir.join("out/report.json")).unwrap();
    assert!(report.contains("\"overall\": \"pass\""));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("[PASS]"));
}

#[test]
fn exit_one_on_failing_check() {
    // the stated dt=1e-3 flow run violates its drift budget
    let dir = tmpdir("fail");
    let cfg = write_cfg(
        &dir,
        "cfg.json",
        r#"{"schema": 1, "command": "flow", "seed": 3, "flow": {"total_time": 0.05, "dt": 0.001, "exponent": 5, "word_cap": 3}}"#,
    );
    let out = bin()
        .args(["flow", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("[FAIL]"));
    let report = std::fs::read_to_string(dir.join("out/report.json")).unwrap();
    assert!(report.contains("\"overall\": \"fail\""));
}

#[test]
fn exit_two_on_unknown_family() {
    let dir = tmpdir("unknown");
    let cfg = write_cfg(
        &dir,
        "cfg.json",
        r#"{"schema": 1, "command": "heat", "family": "nonexistent"}"#,
    );
    let out = bin()
        .args(["heat", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_two_on_unknown_config_field() {
    let dir = tmpdir("schema");
    let cfg = write_cfg(
        &dir,
        "cfg.json",
        r#"{"schema": 1, "command": "heat", "family": "so5", "mystery": true}"#,
    );
    let out = bin().args(["heat", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_two_on_command_mismatch() {
    let dir = tmpdir("mismatch");
    let cfg = write_cfg(
        &dir,
        "cfg.json",
        r#"{"schema": 1, "command": "heat", "family": "so5"}"#,
    );
    let out = bin()
        .args(["curvature", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn spectra_csv_has_the_contract_header() {
    let dir = tmpdir("csv");
    let cfg = write_cfg(
        &dir,
        "cfg.json",
        r#"{"schema": 1, "command": "spectra", "family": "su3", "t_values": [0.0, 0.2], "blocks": [[1, [1, 0]]], "seed": 3}"#,
    );
    let out = bin()
        .args(["spectra", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.join("out/spectra.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("block_key,t,eigen_index,eigenvalue"));
    // 3-dimensional block at two t values
    assert_eq!(lines.count(), 6);
}

#[test]
fn rerun_writes_byte_identical_outputs() {
    let dir = tmpdir("determinism");
    let cfg = write_cfg(
        &dir,
        "cfg.json",
        r#"{"schema": 1, "command": "heat", "family": "su3", "t_values": [0.0, 0.3], "seed": 5}"#,
    );
    let mut contents = Vec::new();
    for run in 0..2 {
        let out_dir = dir.join(format!("out{run}"));
        let st = bin()
            .args(["heat", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out_dir)
            .arg("--seed")
            .arg("5")
            .status()
            .unwrap();
        assert!(st.success());
        contents.push(std::fs::read(out_dir.join("report.json")).unwrap());
    }
    assert_eq!(contents[0], contents[1]);
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tmpdir("seed");
    let cfg = write_cfg(
        &dir,
        "cfg.json",
        r#"{"schema": 1, "command": "verify-family", "family": "su3", "t_values": [0.0, 0.2], "seed": 1}"#,
    );
    let out_dir = dir.join("out");
    let st = bin()
        .args(["verify-family", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .arg("--seed")
        .arg("42")
        .status()
        .unwrap();
    assert!(st.success());
    let report = std::fs::read_to_string(out_dir.join("report.json")).unwrap();
    assert!(report.contains("\"seed\": 42"));
}
