use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_flexscrew"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(format!("{name}.json"))
}

fn run(args: &[&str], out: &Path) -> Output {
    bin()
        .args(args)
        .env_remove("FLEXSCREW_OUT_DIR")
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn fixation_scenario_passes_and_writes_report() {
    let dir = TempDir::new().unwrap();
    let out = run(
        &[
            "run",
            scenario("fig9_fixation").to_str().unwrap(),
            "--quiet",
        ],
        dir.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out.stdout.is_empty());
    let report = read_json(&dir.path().join("fig9_fixation.report.json"));
    assert_eq!(report["verdict"], "PASS");
    assert_eq!(report["provenance"]["tool"], "flexscrew");
    assert_eq!(
        report["provenance"]["scenario_sha256"]
            .as_str()
            .unwrap()
            .len(),
        64
    );
}

#[test]
fn failing_verdict_exits_one_and_writes_csv() {
    let dir = TempDir::new().unwrap();
    let out = run(
        &[
            "run",
            scenario("fig3_shape_check").to_str().unwrap(),
            "--csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let csv =
        std::fs::read_to_string(dir.path().join("fig3_shape_check.01_shape_check.csv")).unwrap();
    assert_eq!(
        csv.lines().next(),
        Some("s_mm,kappa_per_mm,strain,stress_MPa")
    );
    assert!(csv.lines().count() > 100);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("[1] shape_check: FAIL"), "{stdout}");
}

#[test]
fn torque_csv_columns() {
    let dir = TempDir::new().unwrap();
    run(
        &[
            "run",
            scenario("fig4_torque_check").to_str().unwrap(),
            "--csv",
            "--quiet",
        ],
        dir.path(),
    );
    let csv =
        std::fs::read_to_string(dir.path().join("fig4_torque_check.00_torque_check.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("s_mm,kappa_per_mm,torque_Nmm"));
}

#[test]
fn invalid_geometry_exits_two_naming_the_field() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"schema_version": 1, "screw": {"cannula_diameter": 8.0}, "analyses": [{"type": "section"}]}"#,
    )
    .unwrap();
    let out = run(&["run", bad.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("bad.json") && err.contains("screw.cannula_diameter"),
        "{err}"
    );
    assert!(!dir.path().join("bad.report.json").exists());
}

#[test]
fn single_value_sweep_axis_exits_two() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("one.json");
    std::fs::write(
        &bad,
        r#"{"schema_version": 1, "tunnel": {"tension": 5},
            "analyses": [{"type": "sweep", "analysis": {"type": "shape_check"},
                          "axes": [{"parameter": "tension", "values": [5]}]}]}"#,
    )
    .unwrap();
    let out = run(&["sweep", bad.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for d in [&a, &b] {
        run(
            &["run", scenario("fig7_25N").to_str().unwrap(), "--quiet"],
            d.path(),
        );
    }
    let ra = std::fs::read(a.path().join("fig7_25N.report.json")).unwrap();
    let rb = std::fs::read(b.path().join("fig7_25N.report.json")).unwrap();
    assert_eq!(ra, rb);
}

#[test]
fn sweep_rows_do_not_depend_on_jobs() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let file = scenario("sweep_notch_depth");
    run(&["sweep", file.to_str().unwrap(), "--jobs", "1"], a.path());
    run(&["sweep", file.to_str().unwrap(), "--jobs", "3"], b.path());
    let ra = std::fs::read(a.path().join("sweep_notch_depth.sweep.json")).unwrap();
    let rb = std::fs::read(b.path().join("sweep_notch_depth.sweep.json")).unwrap();
    assert_eq!(ra, rb);
}

fn rows(report: &Value) -> Vec<(f64, f64)> {
    report["analyses"][0]["result"]["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            let point = r["point"]
                .as_object()
                .unwrap()
                .values()
                .next()
                .unwrap()
                .as_f64()
                .unwrap();
            (point, r["metrics"]["max_utilization"].as_f64().unwrap())
        })
        .collect()
}

#[test]
fn tension_sweep_utilization_is_non_decreasing() {
    let dir = TempDir::new().unwrap();
    run(
        &["sweep", scenario("sweep_tension").to_str().unwrap()],
        dir.path(),
    );
    let r = rows(&read_json(&dir.path().join("sweep_tension.sweep.json")));
    assert_eq!(
        r.iter().map(|p| p.0).collect::<Vec<_>>(),
        vec![5.0, 10.0, 25.0]
    );
    assert!(r.windows(2).all(|w| w[1].1 >= w[0].1), "{r:?}");
}

#[test]
fn notch_depth_sweep_utilization_strictly_decreases() {
    let dir = TempDir::new().unwrap();
    run(
        &["sweep", scenario("sweep_notch_depth").to_str().unwrap()],
        dir.path(),
    );
    let r = rows(&read_json(&dir.path().join("sweep_notch_depth.sweep.json")));
    assert_eq!(r.len(), 5);
    assert!(r.windows(2).all(|w| w[1].1 < w[0].1), "{r:?}");
}

#[test]
fn out_dir_from_environment() {
    let dir = TempDir::new().unwrap();
    let out = bin()
        .args(["run", scenario("fig7_5N").to_str().unwrap(), "--quiet"])
        .env("FLEXSCREW_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.code().is_some());
    assert!(dir.path().join("fig7_5N.report.json").exists());
}

#[test]
fn defaults_are_echoed() {
    let dir = TempDir::new().unwrap();
    run(
        &[
            "run",
            scenario("fig3_shape_check").to_str().unwrap(),
            "--quiet",
        ],
        dir.path(),
    );
    let report = read_json(&dir.path().join("fig3_shape_check.report.json"));
    let inputs = &report["inputs"];
    assert_eq!(inputs["screw"]["core_diameter"], 7.5);
    assert_eq!(inputs["screw"]["notches"]["depth"], 3.75);
    assert_eq!(inputs["bone"]["material"]["shear_strength"], 1.6);
    assert_eq!(inputs["fixtures"]["conformity"], 1);
    assert_eq!(inputs["tunnel"]["stations_per_mm"], 10);
    assert_eq!(report["analyses"][1]["request"]["engaged"], Value::Null);
    assert!(report["analyses"][1]["result"]["engaged"]["start"].is_number());
}

#[test]
fn validate_and_version() {
    let out = bin()
        .args(["validate", scenario("fig7_25N").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let out = bin().arg("version").output().unwrap();
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("flexscrew "));
}
