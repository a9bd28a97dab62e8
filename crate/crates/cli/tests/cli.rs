use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tml_hawkes::experiments::{read_histogram, IntensityComparison};
use tml_hawkes::simulation::{poisson_pmf, tv_to_pmf};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tml-hawkes"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Schema with the shared definitions inlined, so no external resolution is needed.
fn schema(name: &str) -> jsonschema::JSONSchema {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas");
    let text = std::fs::read_to_string(dir.join(name)).unwrap().replace("common.schema.json#/definitions/", "#/definitions/");
    let mut doc: Value = serde_json::from_str(&text).unwrap();
    let common: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("common.schema.json")).unwrap()).unwrap();
    doc["definitions"] = common["definitions"].clone();
    doc.as_object_mut().unwrap().remove("$id");
    jsonschema::JSONSchema::options().with_draft(jsonschema::Draft::Draft7).compile(&doc).unwrap()
}

fn assert_valid(schema_name: &str, text: &str) {
    let doc: Value = serde_json::from_str(text).unwrap();
    let compiled = schema(schema_name);
    let msgs: Vec<String> = match compiled.validate(&doc) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    panic!("{schema_name}: {msgs:?}");
}

const TEMPERED: [&str; 8] = ["--lambda0", "1", "--alpha", "0.4", "--beta", "0.8", "--gamma", "1"];

#[test]
fn ml_eval_prints_the_value() {
    let v: f64 = stdout(&["ml-eval", "--a", "1", "--b", "1", "--z", "1"]).trim().parse().unwrap();
    assert!((v - std::f64::consts::E).abs() < 1e-12);
    let v: f64 = stdout(&["ml-eval", "--a", "1", "--b", "2", "--z", "-1"]).trim().parse().unwrap();
    assert!((v - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
    let json: Value = serde_json::from_str(&stdout(&["ml-eval", "--a", "0.5", "--z", "0", "--format", "json"])).unwrap();
    assert_eq!(json["value"], 1.0);
}

#[test]
fn kernel_table_cdf_is_monotone_below_one() {
    let csv = stdout(&["kernel", "--beta", "0.9", "--nu", "1", "--gamma", "0.1", "--tmax", "5"]);
    let cdf: Vec<f64> = csv
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('t'))
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(cdf.len(), 100);
    assert!(cdf.windows(2).all(|w| w[1] >= w[0]));
    assert!(*cdf.last().unwrap() < 1.0);
}

#[test]
fn poisson_distribution_matches_the_exact_pmf() {
    let csv = stdout(&["distribution", "--alpha", "0", "--lambda0", "1", "--beta", "1", "--gamma", "1", "--t", "1", "--runs", "100000"]);
    let h = read_histogram(&csv).unwrap();
    let tv = tv_to_pmf(&h, &poisson_pmf(1.0, 60));
    assert!(tv <= 0.01, "tv {tv}");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["ml-eval", "--a", "-1", "--z", "1"]).status.code(), Some(2));
    assert_eq!(run(&["ml-eval", "--z", "1"]).status.code(), Some(2));
    assert_eq!(run(&["preset", "fig9"]).status.code(), Some(2));
    assert_eq!(run(&["intensity", "--lambda0", "1", "--gamma", "1"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let err = run(&["distribution", "--lambda0", "1", "--beta", "0.9", "--gamma", "1", "--t", "1", "--runs", "5"]);
    assert_eq!(err.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&err.stderr).contains("n_runs"));
    // an argument beyond the floating-point range is a numeric failure
    let out = run(&["ml-eval", "--a", "0.05", "--z", "40"]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn config_file_sits_under_the_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(&config, r#"{"preset": "fig3", "n_runs": 200, "master_seed": 5, "alpha": 0.2}"#).unwrap();
    let out = stdout(&["preset", "fig3", "--config", config.to_str().unwrap(), "--runs", "300"]);
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["meta"]["n_runs"], 300);
    assert_eq!(doc["meta"]["seed"], 5);
    assert_eq!(doc["meta"]["params"]["alpha"], 0.2);
    assert_eq!(doc["meta"]["overrides"], serde_json::json!(["alpha", "n_runs", "master_seed"]));
    std::fs::write(&config, r#"{"n_rusn": 200}"#).unwrap();
    assert_eq!(run(&["preset", "fig3", "--config", config.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn presets_are_byte_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let path = dir.path().join(format!("fig5-{threads}.json"));
        let status = bin()
            .args(["preset", "fig5", "--runs", "1000", "--seed", "11", "-o", path.to_str().unwrap()])
            .env("TML_HAWKES_THREADS", threads)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(bin().args(["preset", "fig2"]).env("TML_HAWKES_THREADS", "zero").stderr(std::process::Stdio::null()).status().unwrap().code(), Some(2));
}

#[test]
fn json_outputs_follow_the_schemas() {
    assert_valid("preset.schema.json", &stdout(&["preset", "fig2", "--runs", "200"]));
    let mut args = vec!["distribution", "--t", "2", "--runs", "200", "--format", "json"];
    args.extend(TEMPERED);
    assert_valid("distribution.schema.json", &stdout(&args));
    let mut args = vec!["simulate", "--horizon", "5", "--format", "json"];
    args.extend(TEMPERED);
    assert_valid("path.schema.json", &stdout(&args));
    let mut args = vec!["intensity", "--t", "0.5,1,2", "--format", "json"];
    args.extend(TEMPERED);
    assert_valid("table.schema.json", &stdout(&args));
    assert_valid("table.schema.json", &stdout(&["kernel", "--beta", "0.6", "--gamma", "2", "--tmax", "1", "--format", "json"]));
}

#[test]
fn fig1_preset_parses_back() {
    let csv = stdout(&["preset", "fig1"]);
    let cmp = IntensityComparison::from_csv(&csv).unwrap();
    assert_eq!(cmp.analytic.points.len(), 1500);
    assert!(cmp.max_abs_diff() <= 2e-2);
    let p = cmp.analytic.params;
    assert_eq!((p.lambda0, p.alpha, p.beta, p.nu, p.gamma), (1.0, 0.1, 0.9, 1.0, 0.1));
}

#[test]
fn compare_reports_total_variation() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, seed: &str, format: &str| {
        let path = dir.path().join(name);
        let mut args = vec!["distribution", "--t", "3", "--runs", "5000", "--seed", seed, "--format", format, "-o", path.to_str().unwrap()];
        args.extend(TEMPERED);
        assert!(run(&args).status.success());
        path
    };
    let a = write("a.csv", "1", "csv");
    let b = write("b.json", "2", "json");
    let same: f64 = stdout(&["compare", a.to_str().unwrap(), a.to_str().unwrap()]).trim().parse().unwrap();
    assert_eq!(same, 0.0);
    let tv: f64 = stdout(&["compare", a.to_str().unwrap(), b.to_str().unwrap()]).trim().parse().unwrap();
    assert!(tv > 0.0 && tv < 0.05, "{tv}");
    assert_eq!(run(&["compare", a.to_str().unwrap(), "/nonexistent"]).status.code(), Some(2));
}
