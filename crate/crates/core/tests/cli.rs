use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data").join(name)
}

fn cellcoh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cellcoh")).args(args).output().expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn passing_run_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let input = data("pseudo_circle.json");
    let res = cellcoh(&["cohomology", "--input", path_str(&input), "--report", path_str(&out)]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(report["command"], "cohomology");
    assert_eq!(report["seed"], 0);
    assert!(report["assertions"].as_array().unwrap().iter().all(|a| a["pass"] == true));
    assert_eq!(report["input_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn reports_are_reproducible() {
    let input = data("sign_complex.json");
    let a = cellcoh(&["cl", "--input", path_str(&input), "--seed", "5"]);
    let b = cellcoh(&["cl", "--input", path_str(&input), "--seed", "5"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn wrong_expectation_exits_one() {
    // Raising the level to Z/4 breaks the expectations written for Z/2.
    let input = data("pseudo_circle.json");
    let res = cellcoh(&["cohomology", "--input", path_str(&input), "--m", "2"]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("FAIL H^0"));
}

#[test]
fn input_errors_exit_two_with_a_pointer() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"version": 1, "coefficients": {"l": 2, "m": "one"}}"#).unwrap();
    let res = cellcoh(&["cohomology", "--input", path_str(&bad)]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("/coefficients/m"));

    let missing = dir.path().join("missing.json");
    assert_eq!(cellcoh(&["cohomology", "--input", path_str(&missing)]).status.code(), Some(2));

    let res = cellcoh(&["cohomology", "--input", path_str(&data("pseudo_circle.json")), "--l", "4"]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn level_check_runs_alongside() {
    let input = data("sign_module.json");
    let res = cellcoh(&["group-cohomology", "--input", path_str(&input), "--level-check"]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let report: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    let names: Vec<&str> = report["assertions"].as_array().unwrap().iter().map(|a| a["name"].as_str().unwrap()).collect();
    assert!(names.iter().any(|n| n.contains("level")), "{names:?}");
}
