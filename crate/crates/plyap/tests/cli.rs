use std::path::Path;
use std::process::{Command, Output};

fn plyap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plyap")).args(args).env("SOURCE_DATE_EPOCH", "0").output().unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn run_writes_all_outputs_with_hash() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("res");
    let cfg = write_config(
        dir.path(),
        "lin.json",
        &format!(r#"{{"id": "lin", "system": "linear", "r": 2, "output_dir": {:?}}}"#, out_dir.to_str().unwrap()),
    );
    let out = plyap(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    let hash = summary["config_hash"].as_str().unwrap();
    assert_eq!(hash.len(), 64);
    assert_eq!(summary["provenance"]["generated_at"], "1970-01-01T00:00:00Z");
    for file in ["distance.csv", "divergence.csv", "lambda_t.csv"] {
        let text = std::fs::read_to_string(out_dir.join(file)).unwrap();
        assert_eq!(text.lines().next().unwrap(), format!("# config_hash={hash}"));
    }
}

#[test]
fn summary_matches_published_schema() {
    let schema: serde_json::Value = serde_json::from_str(plyap::output::SUMMARY_SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let dir = tempfile::tempdir().unwrap();
    for text in [
        r#"{"id": "a", "system": "linear", "r": 3}"#,
        r#"{"id": "b", "system": "r_adic", "r": 2}"#,
        r#"{"id": "c", "system": "oscillator", "omega": 2}"#,
        r#"{"id": "d", "system": "baker_koopman", "m": 6}"#,
    ] {
        let mut cfg = plyap::ExperimentConfig::from_json(text, "schema", Path::new(".")).unwrap();
        cfg.output_dir = dir.path().join(&cfg.id);
        let res = plyap::run(&cfg).unwrap();
        plyap::output::write_result(&res, &cfg.output_dir).unwrap();
        let summary: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(cfg.output_dir.join("summary.json")).unwrap()).unwrap();
        let errors: Vec<String> = validator.iter_errors(&summary).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{}: {errors:?}", cfg.id);
    }
}

#[test]
fn malformed_configs_exit_2_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    for (body, field) in [
        (r#"{"id": "x", "system": "linear", "r": "two"}"#, "r"),
        (r#"{"id": "x", "system": "linear", "r": 0.5}"#, "r"),
        (r#"{"id": "x", "system": "linear", "r": 2, "omega": 1}"#, "omega"),
        (r#"{"id": "x", "system": "oscillator", "omega": 2, "theta": 2}"#, "theta"),
        (r#"{"id": "../x", "system": "linear", "r": 2}"#, "id"),
        (r#"{"id": "x", "system": "pendulum"}"#, "system"),
    ] {
        let cfg = write_config(dir.path(), "bad.json", body);
        let out = plyap(&["run", &cfg]);
        assert_eq!(out.status.code(), Some(2), "{body}: {}", stderr(&out));
        assert!(stderr(&out).contains(field), "{body}: {}", stderr(&out));
    }
    let out = plyap(&["run", "/nonexistent/config.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ingest_data_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = plyap(&["ingest", "/nonexistent/o.csv", "--convention", "amplitude"]);
    assert_eq!(out.status.code(), Some(3));

    let csv = dir.path().join("bad.csv");
    std::fs::write(&csv, "t,overlap\n0,1\n1,0.9\n2,1.5\n3,0.5\n").unwrap();
    let out =
        plyap(&["ingest", csv.to_str().unwrap(), "--convention", "amplitude", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("4"), "{}", stderr(&out));
}

#[test]
fn ingest_constant_series_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("flat series.csv");
    let rows: String = (0..50).map(|k| format!("{k},0.8\n")).collect();
    std::fs::write(&csv, format!("t,overlap\n{rows}")).unwrap();
    let out =
        plyap(&["ingest", csv.to_str().unwrap(), "--convention", "amplitude", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("flat_series/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["classification"]["class"], "stable");
}

#[test]
fn figure_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = plyap(&["figure", "fig1a", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let svg = std::fs::read_to_string(dir.path().join("fig1a/fig1a.svg")).unwrap();
    assert!(svg.starts_with("<svg") && !svg.contains("href"));
    assert_eq!(svg.matches("<polyline").count(), 4);

    let out = plyap(&["figure", "fig9"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn selftest_passes() {
    let out = Command::new(env!("CARGO_BIN_EXE_plyap")).args(["selftest"]).env("PLYAP_THREADS", "2").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().all(|l| l.starts_with("PASS")), "{text}");
}
