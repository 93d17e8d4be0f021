use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_mps-orf");

fn mps(args: &[&str], cwd: &Path) -> Output {
    Command::new(BIN).args(args).current_dir(cwd).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

const SMALL: &str = r#"{"id": "small", "function": {"kind": "scaled_identity", "lambda": [0.5, 0.0]},
  "alphas": {"kind": "classical"}, "M": 256, "n_max": 4, "out_dir": "from-config",
  "diagnostics": ["gamma_abs", "remainder_energy"]}"#;

#[test]
fn run_writes_selected_series_and_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "small.json", SMALL);
    let out = mps(&["run", "--config", &cfg], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = tmp.path().join("from-config");
    let csv = std::fs::read_to_string(dir.join("small.gamma_abs.csv")).unwrap();
    assert!(csv.starts_with("n,value\n0,0.0000000000000000e0\n1,5.0000000000000000e-1\n"), "{csv}");
    assert!(dir.join("small.remainder_energy.csv").exists());
    assert!(!dir.join("small.kappa.csv").exists());
    assert!(dir.join("small.report.json").exists());

    let cli_dir = tmp.path().join("from-cli");
    let out = mps(&["run", "--config", &cfg, "--out-dir", cli_dir.to_str().unwrap(), "--plots"], tmp.path());
    assert!(out.status.success());
    assert!(cli_dir.join("small.gamma_abs.svg").exists());
}

#[test]
fn under_resolved_run_is_refused_unless_forced() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "tight.json",
        r#"{"id": "tight", "function": {"kind": "scaled_identity", "lambda": [0.5, 0.0]},
            "alphas": {"kind": "radial"}, "M": 256, "n_max": 10}"#,
    );
    let out = mps(&["run", "--config", &cfg, "--out-dir", "o"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--force"));
    assert!(!tmp.path().join("o/tight.report.json").exists());
    let out = mps(&["run", "--config", &cfg, "--out-dir", "o", "--force"], tmp.path());
    assert!(out.status.success());
    assert!(tmp.path().join("o/tight.report.json").exists());
}

#[test]
fn bad_configs_report_location() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "bad.json", "{\n  \"id\": \"x\",\n  \"bogus\": 1\n}");
    let out = mps(&["run", "--config", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");

    let cfg = write(tmp.path(), "m.json", &SMALL.replace("256", "300"));
    let out = mps(&["run", "--config", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("power of two"));
}

#[test]
fn unknown_builtin_lists_the_known_ones() {
    let tmp = tempfile::tempdir().unwrap();
    let out = mps(&["scenario", "nope"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("half-z-radial"));
}

#[test]
fn seeded_run_reports_sampled_checks() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "small.json", SMALL);
    let out = mps(&["run", "--config", &cfg, "--seed", "7"], tmp.path());
    assert!(out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("PASS #2") && err.contains("PASS #3"), "{err}");
}
