use std::path::PathBuf;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fgl-lab")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn construct_then_verify() {
    let law = scratch("p3h2.json");
    let rep = scratch("p3h2-report.json");
    let out = lab(&["construct", "--p", "3", "--h", "2", "--out", law.to_str().unwrap(), "--report", rep.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&rep).unwrap()).unwrap();
    assert_eq!(report["config"]["N"], 81);
    assert!(report.get("timing").is_none());
    let out = lab(&["verify-law", law.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn tampered_law_fails_checks() {
    let law = scratch("p2h2.json");
    assert_eq!(lab(&["construct", "--prec", "24", "--out", law.to_str().unwrap()]).status.code(), Some(0));
    let mut file: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&law).unwrap()).unwrap();

    file["meta"]["h"] = 3.into();
    let wrong_h = scratch("wrong-h.json");
    std::fs::write(&wrong_h, file.to_string()).unwrap();
    assert_eq!(lab(&["verify-law", wrong_h.to_str().unwrap()]).status.code(), Some(1));

    file["meta"]["h"] = 2.into();
    file["G"][2][2][0] = 0.into();
    let edited = scratch("edited.json");
    std::fs::write(&edited, file.to_string()).unwrap();
    let out = lab(&["verify-law", edited.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["checks"][0]["name"], "source_hash");
    assert_eq!(report["checks"][0]["pass"], false);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(lab(&["height", "--p", "4"]).status.code(), Some(2));
    assert_eq!(lab(&["centralizer", "--field-deg", "1"]).status.code(), Some(2));
    assert_eq!(lab(&["height", "--policy", "16"]).status.code(), Some(2));
    assert_eq!(lab(&["ramification", "--h", "2"]).status.code(), Some(2));
    assert_eq!(lab(&["verify-law", "/nonexistent/law.json"]).status.code(), Some(2));
    assert_eq!(lab(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn short_precision_exits_three() {
    assert_eq!(lab(&["trichotomy", "--prec", "8"]).status.code(), Some(3));
    let out = lab(&["height", "--prec", "64"]);
    assert_eq!(out.status.code(), Some(3));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["precision_short"], true);
}

#[test]
fn csv_output() {
    let out = lab(&["ramification", "--p", "3", "--h", "1", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "experiment,check,anchor,inputs_digest,measured,expected,pass");
    assert_eq!(lines.filter(|l| l.starts_with("ramification,e_")).count(), 4);
}

#[test]
fn bench_reports_timing() {
    let out = lab(&["bench", "--prec", "64"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["timing"]["compose"].as_array().unwrap().len() >= 2);
}
