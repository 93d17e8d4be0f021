use mps_orf::fixtures::{n_star, pinned};
use mps_orf::output::{emit_outputs, parse_series_csv, REPORT_SCHEMA};
use mps_orf::scenario::{builtin, parse_config, Outcome};

fn validator() -> jsonschema::Validator {
    let schema: serde_json::Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

#[test]
fn csv_files_reproduce_the_report() {
    let report = builtin("half-z-classical").unwrap().run().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = emit_outputs(&report, dir.path(), true).unwrap();
    assert_eq!(files.len(), 2 * report.series.len() + 1);
    for (kind, values) in &report.series {
        let text = std::fs::read_to_string(dir.path().join(format!("half-z-classical.{kind}.csv"))).unwrap();
        let back = parse_series_csv(&text).unwrap();
        assert_eq!(back.len(), values.len(), "{kind}");
        for ((n, a), (m, b)) in values.iter().zip(&back) {
            assert_eq!(n, m);
            assert!(a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()), "{kind} at {n}");
        }
        let ns: Vec<usize> = back.iter().map(|(n, _)| *n).collect();
        assert!(ns.windows(2).all(|w| w[0] < w[1]), "{kind} indices increase");
        assert!(dir.path().join(format!("half-z-classical.{kind}.svg")).exists());
    }
}

#[test]
fn report_json_matches_schema() {
    let v = validator();
    for name in ["half-z-classical", "inner-stress"] {
        let report = builtin(name).unwrap().run().unwrap();
        let dir = tempfile::tempdir().unwrap();
        emit_outputs(&report, dir.path(), false).unwrap();
        let text = std::fs::read_to_string(dir.path().join(format!("{name}.report.json"))).unwrap();
        let json: serde_json::Value = serde_json::from_str(&text).unwrap();
        let errors: Vec<String> = v.iter_errors(&json).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{name}: {errors:?}");
        assert_eq!(json["M"], 4096);
    }
    let bad = serde_json::json!({"scenario": "x", "M": 256});
    assert!(!v.is_valid(&bad));
}

#[test]
fn refused_runs_name_the_offending_node() {
    let text = r#"{"id": "tight", "function": {"kind": "scaled_identity", "lambda": [0.5, 0.0]},
                   "alphas": {"kind": "radial"}, "M": 256, "n_max": 10}"#;
    let s = parse_config(text).unwrap().remove(0);
    match s.run_guarded(false).unwrap() {
        Outcome::Refused(w) => assert!(w.iter().any(|m| m.contains("alpha")), "{w:?}"),
        Outcome::Report(_) => panic!("under-resolved run was not refused"),
    }
    assert!(matches!(s.run_guarded(true).unwrap(), Outcome::Report(_)));
}

#[test]
fn acceptance_resolution_agrees_with_reference() {
    let fixture = pinned();
    let report = builtin("half-z-radial").unwrap().run().unwrap();
    for (kind, reference) in &fixture.series {
        let here = report.series(kind).unwrap();
        assert_eq!(here.len(), reference.len(), "{kind}");
        let gap = here
            .iter()
            .zip(reference)
            .fold(0f64, |m, ((_, a), (_, b))| m.max((a - b).abs() / b.abs().max(1e-3)));
        assert!(gap < 0.05, "{kind}: relative gap {gap:.3e} between M = 4096 and M = {}", fixture.m);
    }
    let energy = report.series("remainder_energy").unwrap();
    let star = n_star(energy, |v| v < fixture.energy.threshold).unwrap();
    assert!(star <= fixture.energy.n_star + 1);
}
