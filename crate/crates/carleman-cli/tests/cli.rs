//! Exit-code and configuration behavior of the binary.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_carleman"))
}

fn out_dir(tag: &str) -> tempfile::TempDir {
    tempfile::Builder::new().prefix(tag).tempdir().unwrap()
}

#[test]
fn passing_run_exits_zero_and_writes_report() {
    let dir = out_dir("pass");
    let st = bin()
        .args(["--out-dir"])
        .arg(dir.path())
        .args(["seq-check", "--kind", "gammafact", "--rho", "1", "--K", "500"])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(0), "{}", String::from_utf8_lossy(&st.stderr));
    let text = std::fs::read_to_string(dir.path().join("seq_check.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["status"], "pass");
    assert_eq!(v["config"]["sequence"]["kind"], "gammafact");
    assert_eq!(v["config"]["sequence"]["K"], 500);
}

#[test]
fn failed_condition_exits_two() {
    // M_k = k + 1 is increasing but not log convex and falls below any
    // factorial-times-geometric floor
    let dir = out_dir("fail");
    let ln_m: Vec<f64> = (0..=200).map(|k| ((k + 1) as f64).ln()).collect();
    let cfg = serde_json::json!({
        "sequence": {"kind": "table", "lnM": ln_m},
    });
    let cfg_path = dir.path().join("config.json");
    std::fs::write(&cfg_path, serde_json::to_vec(&cfg).unwrap()).unwrap();
    let st = bin()
        .args(["--config"])
        .arg(&cfg_path)
        .args(["--out-dir"])
        .arg(dir.path())
        .args(["seq-check"])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(2), "{}", String::from_utf8_lossy(&st.stderr));
    let text = std::fs::read_to_string(dir.path().join("seq_check.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["status"], "fail");
    assert_eq!(v["results"]["i1"]["ok"], false);
}

#[test]
fn unstabilized_supremum_exits_three() {
    // the family gap maximizer sits near r ~ 1e4 for these parameters, so
    // a grid capped at r = 20 leaves the running max still moving
    let dir = out_dir("inconclusive");
    let st = bin()
        .args(["--out-dir"])
        .arg(dir.path())
        .args(["verify", "lemma3", "--m", "1", "--A", "1", "--rmax", "20"])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(3), "{}", String::from_utf8_lossy(&st.stderr));
    let text = std::fs::read_to_string(dir.path().join("verify_lemma3.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["status"], "inconclusive");
    assert_eq!(v["results"]["stabilized"], false);
}

#[test]
fn input_errors_exit_four_without_artifacts() {
    let dir = out_dir("err");
    for args in [
        vec!["--bogus-flag"],
        vec!["seq-check", "--kind", "mstar", "--rho", "0.5"],
        vec!["seq-check", "--K", "4"],
        vec!["verify", "sandwich", "--rho", "1", "--rmax", "2.0"],
        vec!["fit", "--target", "nonsense"],
        vec!["check8", "--rmax-idx", "900", "--J", "500"],
    ] {
        let st = bin()
            .args(["--out-dir"])
            .arg(dir.path())
            .args(&args)
            .output()
            .unwrap();
        assert_eq!(
            st.status.code(),
            Some(4),
            "{args:?}: {}",
            String::from_utf8_lossy(&st.stderr)
        );
    }
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = out_dir("cfgkeys");
    let cfg_path = dir.path().join("config.json");
    std::fs::write(
        &cfg_path,
        r#"{"sigma": 1.0, "mystery_knob": 42}"#,
    )
    .unwrap();
    let st = bin()
        .args(["--config"])
        .arg(&cfg_path)
        .args(["seq-check"])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(4));
    let err = String::from_utf8_lossy(&st.stderr);
    assert!(err.contains("mystery_knob"), "stderr: {err}");
}

#[test]
fn config_file_fields_flow_into_reports_and_flags_override() {
    let dir = out_dir("cfgflow");
    let cfg_path = dir.path().join("config.json");
    std::fs::write(
        &cfg_path,
        r#"{"sequence": {"kind":"mstar","rho":2.0,"K":600}, "sigma": 2.5}"#,
    )
    .unwrap();
    let st = bin()
        .args(["--config"])
        .arg(&cfg_path)
        .args(["--out-dir"])
        .arg(dir.path())
        .args(["--rho", "1.0", "zeros", "--J", "5"])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(0), "{}", String::from_utf8_lossy(&st.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("zeros.json")).unwrap())
            .unwrap();
    // flag override wins for rho; file value stays for sigma
    assert_eq!(v["config"]["sequence"]["rho"], 1.0);
    assert_eq!(v["config"]["sigma"], 2.5);
    // first zero radius = sigma * M_1 = 2.5 * 2
    let text = std::fs::read_to_string(dir.path().join("zeros.csv")).unwrap();
    let first = text.lines().nth(1).unwrap();
    let radius: f64 = first.split(',').nth(1).unwrap().parse().unwrap();
    assert!((radius - 5.0).abs() < 1e-12);
}

#[test]
fn help_exits_zero() {
    let st = bin().arg("--help").output().unwrap();
    assert_eq!(st.status.code(), Some(0));
    let body = String::from_utf8_lossy(&st.stdout);
    for sub in ["seq-check", "weight-eval", "conjugate", "hfun", "verify", "zeros", "check8", "fit"] {
        assert!(body.contains(sub), "help lacks {sub}");
    }
}
