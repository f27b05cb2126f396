//! Binary-level interface tests.

use std::process::Command;

fn otlab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_otlab"))
}

#[test]
fn spectrum_emits_three_files_and_fits_weyl() {
    let dir = tempfile::tempdir().unwrap();
    let status = otlab()
        .args(["--out"])
        .arg(dir.path())
        .args(["spectrum", "--d", "2", "--R", "40", "--s", "1"])
        .stdout(std::process::Stdio::null())
        .status()
        .unwrap();
    assert!(status.success());
    let eig = std::fs::read_to_string(dir.path().join("eigenvalues.csv")).unwrap();
    assert!(eig.starts_with("rank,lambda\n"));
    assert_eq!(eig.lines().count(), 81 * 81 + 1);
    let mu = std::fs::read_to_string(dir.path().join("ls_spectrum.csv")).unwrap();
    assert!(mu.lines().nth(1).unwrap().starts_with("1,1.0000000000000"));
    let fit: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("weyl_fit.json")).unwrap())
            .unwrap();
    let c_hat = fit["C_hat"].as_f64().unwrap();
    assert!((c_hat - 0.0796).abs() < 0.004, "C_hat = {c_hat}");
}

#[test]
fn spectrum_output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let status = otlab()
            .args(["--out"])
            .arg(out)
            .args(["spectrum", "--d", "2", "--R", "12", "--s", "1"])
            .stdout(std::process::Stdio::null())
            .status()
            .unwrap();
        assert!(status.success());
    }
    for name in ["eigenvalues.csv", "ls_spectrum.csv", "weyl_fit.json"] {
        let x = std::fs::read(a.join(name)).unwrap();
        let y = std::fs::read(b.join(name)).unwrap();
        assert_eq!(x, y, "{name} differs between runs");
    }
}

#[test]
fn spectrum_degrades_gracefully_at_small_radius() {
    let dir = tempfile::tempdir().unwrap();
    let status = otlab()
        .args(["--out"])
        .arg(dir.path())
        .args(["spectrum", "--R", "2"])
        .stdout(std::process::Stdio::null())
        .stderr(std::process::Stdio::null())
        .status()
        .unwrap();
    assert!(status.success(), "degraded mode must still exit 0");
    assert!(dir.path().join("eigenvalues.csv").exists());
    assert!(dir.path().join("ls_spectrum.csv").exists());
    let fit: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("weyl_fit.json")).unwrap())
            .unwrap();
    assert!(fit["error"].as_str().unwrap().contains("truncation too small"));
}

#[test]
fn malformed_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    std::fs::write(&config, "nonsense_key = true\n").unwrap();
    let output = otlab()
        .args(["--config"])
        .arg(&config)
        .args(["--out"])
        .arg(dir.path())
        .arg("check-all")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("nonsense_key"), "diagnostics missing: {stderr}");
}

#[test]
fn norm_command_reads_sequence_files() {
    let dir = tempfile::tempdir().unwrap();
    let seq = dir.path().join("seq.txt");
    std::fs::write(&seq, "0.25\n1.0\n# comment\n0.5\n").unwrap();
    let output = otlab()
        .args(["--out"])
        .arg(dir.path())
        .args(["norm", "--file"])
        .arg(&seq)
        .args(["--phi", "power:p=1"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("norm.json")).unwrap())
            .unwrap();
    assert_eq!(report["value"].as_f64().unwrap(), 1.75);
    assert_eq!(report["count"].as_u64().unwrap(), 3);
}

#[test]
fn csv_format_flattens_reports() {
    let dir = tempfile::tempdir().unwrap();
    let seq = dir.path().join("seq.txt");
    std::fs::write(&seq, "1.0\n").unwrap();
    let status = otlab()
        .args(["--out"])
        .arg(dir.path())
        .args(["--format", "csv", "norm", "--file"])
        .arg(&seq)
        .stdout(std::process::Stdio::null())
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(dir.path().join("norm.csv")).unwrap();
    assert!(text.starts_with("key,value\n"));
    assert!(text.contains("value,1.0000000000"));
}

#[test]
fn membership_divergent_gauge_reported() {
    let dir = tempfile::tempdir().unwrap();
    let output = otlab()
        .args(["--out"])
        .arg(dir.path())
        .args(["membership", "--phi", "power:p=2", "--R", "12"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("membership.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["verdict"]["kind"].as_str().unwrap(), "fails");
}

#[test]
fn element_json_accepted_by_solve() {
    let dir = tempfile::tempdir().unwrap();
    // config radius 4 grid: hand-rolled two-mode source
    let source = serde_json::json!({
        "d": 2,
        "R": 4,
        "theta": [0.3],
        "coeffs": [[0.0, 0.0, 1.0, 0.0], [1.0, 0.0, 0.25, -0.5]]
    });
    let f_path = dir.path().join("f.json");
    std::fs::write(&f_path, source.to_string()).unwrap();
    let status = otlab()
        .args(["--out"])
        .arg(dir.path())
        .args(["solve", "--f"])
        .arg(&f_path)
        .stdout(std::process::Stdio::null())
        .status()
        .unwrap();
    assert!(status.success());
    let solution = std::fs::read_to_string(dir.path().join("solution.json")).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&solution).unwrap();
    assert_eq!(parsed["d"].as_u64().unwrap(), 2);
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("solve_report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(
        report["regularity"]["verdict"]["kind"].as_str().unwrap(),
        "holds"
    );
}
