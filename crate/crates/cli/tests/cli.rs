use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn pilotwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pilotwave")).args(args).output().expect("binary runs")
}

const SMALL: &str = r#"{
  "name": "small_pair",
  "state": {
    "kind": "antisymmetrize",
    "orbitals": [
      {"kind": "gaussian", "center": [-4.0], "momentum": [2.0], "width": 1.0, "mass": 1.0},
      {"kind": "gaussian", "center": [4.0], "momentum": [-2.0], "width": 1.0, "mass": 1.0}
    ]
  },
  "species": [
    {"mass": 1.0, "charge": 0.0, "statistics": {"kind": "fermion"}},
    {"mass": 1.0, "charge": 0.0, "statistics": {"kind": "fermion"}}
  ],
  "potential": [],
  "initial": {"mode": "sampled", "count": 40, "seed": 8},
  "time": {"t0": 0.0, "t1": 4.0},
  "monitors": {MONITORS},
  "outputs": {"trajectories": 3, "reduced": true}
}"#;

fn write_scenario(dir: &Path, monitors: &str) -> String {
    let path = dir.join("scenario.json");
    fs::write(&path, SMALL.replace("{MONITORS}", monitors)).unwrap();
    path.to_string_lossy().into_owned()
}

fn artifacts(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn list_models_prints_the_catalogue() {
    let out = pilotwave(&["list-models"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().lines().count() >= 6);

    let out = pilotwave(&["list-models", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.as_array().unwrap().len() >= 6);
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(pilotwave(&["simulate", "--frobnicate", "x.json"]).status.code(), Some(2));
    assert_eq!(pilotwave(&[]).status.code(), Some(2));
}

#[test]
fn missing_state_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let text = SMALL.replace("{MONITORS}", "{}");
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let mut obj = v.as_object().unwrap().clone();
    obj.remove("state");
    fs::write(&path, serde_json::to_string(&obj).unwrap()).unwrap();
    let out = pilotwave(&["simulate", path.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("state"));
}

#[test]
fn missing_file_is_an_error() {
    let out = pilotwave(&["simulate", "/nonexistent/scenario.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_writes_identical_artifacts_on_repeat() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), r#"{"min_distance": {"above": 1e-8}, "crossing": {"expect": false}}"#);
    let runs: Vec<_> = ["a", "b"]
        .iter()
        .map(|sub| {
            let out_dir = dir.path().join(sub);
            let out = pilotwave(&["simulate", &scenario, "--out", out_dir.to_str().unwrap()]);
            assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
            artifacts(&out_dir)
        })
        .collect();
    let names: Vec<&str> = runs[0].iter().map(|(n, _)| n.as_str()).collect();
    assert!(names.contains(&"small_pair_report.json"));
    assert!(names.contains(&"small_pair_trajectory_0002.csv"));
    assert!(names.contains(&"small_pair_reduced_0000.csv"));
    assert!(names.contains(&"small_pair.svg"));
    assert_eq!(runs[0], runs[1]);

    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("a/small_pair_report.json")).unwrap()).unwrap();
    let keys: Vec<&str> = report.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys.len(), 5, "{keys:?}");
    assert_eq!(report["n"], 40);
    assert_eq!(report["seed"], 8);
    assert!(report["coincidence_fraction"]["1e-3"].is_number());
}

#[test]
fn seed_override_changes_the_ensemble() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), "{}");
    for (sub, seed) in [("a", "8"), ("b", "9")] {
        let out = pilotwave(&["simulate", &scenario, "--seed", seed, "--threads", "2", "--out", dir.path().join(sub).to_str().unwrap()]);
        assert!(out.status.success());
    }
    let a = fs::read(dir.path().join("a/small_pair_trajectory_0000.csv")).unwrap();
    let b = fs::read(dir.path().join("b/small_pair_trajectory_0000.csv")).unwrap();
    assert_ne!(a, b);
    let report: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("b/small_pair_report.json")).unwrap()).unwrap();
    assert_eq!(report["seed"], 9);
}

#[test]
fn failed_monitor_exits_one_with_json_failures() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), r#"{"crossing": {"expect": true}, "min_distance": {"above": 1e-8}}"#);
    let out = pilotwave(&["simulate", &scenario, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let failures = v["failures"].as_array().unwrap();
    assert_eq!(failures.len(), 1);
    assert_eq!(failures[0]["monitor"], "crossing");
}

#[test]
fn check_suite_passes_and_the_bias_hook_breaks_it() {
    let out = pilotwave(&["check"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.lines().count() >= 12);

    let out = pilotwave(&["check", "--bias", "1e-3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("FAIL"));
}
