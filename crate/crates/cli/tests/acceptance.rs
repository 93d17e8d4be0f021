//! The thirteen acceptance criteria, one PASS/FAIL line each.
//!
//! Criterion 13 is checked twice: in process, and by running the binary
//! twice per built-in (and once more with a different `--jobs`) and comparing
//! every output file byte for byte.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, ExitCode};

use mps_orf::checks::{CheckResult, Suite, DEFAULT_SEED};
use mps_orf::scenario::BUILTIN_NAMES;

const BIN: &str = env!("CARGO_BIN_EXE_mps-orf");

const MIXED_CONFIG: &str = r#"[
  {"id": "cfg-radial", "function": {"kind": "scaled_identity", "lambda": [0.5, 0.0]},
   "alphas": {"kind": "radial"}, "M": 2048, "n_max": 16},
  {"id": "cfg-cycle", "function": {"kind": "rational", "num": [[0.1, 0.0], [0.3, 0.1]], "den": [[1.0, 0.0], [-0.2, 0.0]]},
   "alphas": {"kind": "cycle", "points": [[0.0, 0.0], [0.3, 0.0], [0.0, 0.5]]}, "M": 1024, "n_max": 12}
]"#;

fn read_dir(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .expect("output directory")
        .map(|e| {
            let e = e.expect("entry");
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).expect("file"))
        })
        .collect()
}

fn invoke(args: &[&str]) -> Result<(), String> {
    let out = Command::new(BIN).args(args).output().map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)))
    }
}

fn binary_determinism() -> Result<String, String> {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = 0;
    for name in BUILTIN_NAMES {
        let a = tmp.path().join(format!("{name}-a"));
        let b = tmp.path().join(format!("{name}-b"));
        invoke(&["scenario", name, "--plots", "--out-dir", a.to_str().unwrap()])?;
        invoke(&["scenario", name, "--plots", "--out-dir", b.to_str().unwrap()])?;
        let (ra, rb) = (read_dir(&a), read_dir(&b));
        if ra.is_empty() || ra != rb {
            return Err(format!("{name}: outputs differ between runs"));
        }
        files += ra.len();
    }
    let cfg = tmp.path().join("mixed.json");
    std::fs::write(&cfg, MIXED_CONFIG).map_err(|e| e.to_string())?;
    let one = tmp.path().join("jobs1");
    let two = tmp.path().join("jobs2");
    invoke(&["run", "--config", cfg.to_str().unwrap(), "--jobs", "1", "--out-dir", one.to_str().unwrap()])?;
    invoke(&["run", "--config", cfg.to_str().unwrap(), "--jobs", "2", "--out-dir", two.to_str().unwrap()])?;
    let (r1, r2) = (read_dir(&one), read_dir(&two));
    if r1.is_empty() || r1 != r2 {
        return Err("config run differs between --jobs 1 and --jobs 2".into());
    }
    Ok(format!("{} files identical across binary runs and job counts", files + r1.len()))
}

fn main() -> ExitCode {
    let suite = Suite::new(DEFAULT_SEED).expect("built-in scenarios run");
    let mut results: Vec<CheckResult> = suite.acceptance().expect("acceptance checks run");
    let last = results.last_mut().expect("thirteen results");
    match binary_determinism() {
        Ok(detail) => last.detail = format!("{}; {detail}", last.detail),
        Err(e) => {
            last.passed = false;
            last.detail = format!("{}; binary: {e}", last.detail);
        }
    }
    assert_eq!(results.len(), 13);
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
