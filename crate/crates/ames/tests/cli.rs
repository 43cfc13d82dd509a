use std::path::Path;
use std::process::{Command, Output};

const TIE_PB: &str = "META\nkey;value\nvote_type;approval\nbudget;5\n\
PROJECTS\nproject_id;cost\np1;1\np2;4\np3;2\n\
VOTES\nvoter_id;vote\nv1;p1,p2\nv2;p2,p3\n";

fn ames(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ames"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("tie.pb"), TIE_PB).unwrap();
    dir
}

#[test]
fn run_prints_outcome() {
    let dir = setup();
    let out = ames(&["run", "tie.pb"], dir.path());
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("p1"));
    assert!(text.contains("p3"));
    assert!(!text.contains("p2\t"));
}

#[test]
fn run_json_and_trace() {
    let dir = setup();
    let out = ames(
        &["run", "tie.pb", "--json", "--trace", "trace.json"],
        dir.path(),
    );
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["outcome"], serde_json::json!(["p1", "p3"]));
    let trace: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("trace.json")).unwrap())
            .unwrap();
    assert_eq!(trace.as_array().unwrap().len(), 2);
}

#[test]
fn certify_then_verify_accepts() {
    let dir = setup();
    let cert = ames(&["certify", "tie.pb"], dir.path());
    assert!(cert.status.success());
    std::fs::write(dir.path().join("cert.json"), &cert.stdout).unwrap();
    let verify = ames(&["verify", "tie.pb", "--certificate", "cert.json"], dir.path());
    assert!(verify.status.success());
    assert!(stdout(&verify).contains("accept"));
}

#[test]
fn verify_rejects_tampered_certificate_with_exit_2() {
    let dir = setup();
    let cert = ames(&["certify", "tie.pb"], dir.path());
    let text = String::from_utf8(cert.stdout).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    // inflate the first capacity's numerator
    let cap = &mut v["capacities"][0][1];
    *cap = serde_json::json!(cap.as_i64().unwrap() + 100);
    std::fs::write(dir.path().join("bad.json"), v.to_string()).unwrap();
    let verify = ames(
        &["verify", "tie.pb", "--certificate", "bad.json", "--json"],
        dir.path(),
    );
    assert_eq!(verify.status.code(), Some(2));
    let out: serde_json::Value = serde_json::from_str(&stdout(&verify)).unwrap();
    assert_eq!(out["verdict"], "reject");
    assert!(out["reason"].as_str().unwrap().contains("capacity of voter"));
}

#[test]
fn skip_prints_next_budget() {
    let dir = setup();
    let out = ames(&["skip", "tie.pb"], dir.path());
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "8");
}

#[test]
fn complete_strategies_agree_on_final_outcome() {
    let dir = setup();
    let mut outcomes = Vec::new();
    for strategy in ["restart-mes", "adaptive-ames", "skip-ames"] {
        let out = ames(
            &[
                "complete", "tie.pb", "--budget", "8", "--strategy", strategy, "--json",
            ],
            dir.path(),
        );
        assert!(out.status.success(), "{strategy}");
        let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        outcomes.push(v["final_outcome"].clone());
    }
    assert_eq!(outcomes[1], outcomes[2]);
    assert_eq!(outcomes[1], serde_json::json!(["p1", "p2", "p3"]));
}

#[test]
fn unknown_strategy_fails() {
    let dir = setup();
    let out = ames(&["complete", "tie.pb", "--strategy", "bogus"], dir.path());
    assert!(!out.status.success());
}

#[test]
fn ejr_passes_on_search_output() {
    let dir = setup();
    let out = ames(&["ejr", "tie.pb"], dir.path());
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("pass"));
}

#[test]
fn ejr_limit_env_override() {
    let dir = setup();
    let out = Command::new(env!("CARGO_BIN_EXE_ames"))
        .args(["ejr", "tie.pb"])
        .env("AMES_MAX_ORACLE_PROJECTS", "2")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceed"));
}

#[test]
fn experiment_emits_csv_with_summary() {
    let dir = setup();
    let out = ames(&["experiment", "tie.pb", "--runs", "3"], dir.path());
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(
        lines[0],
        "run,virtual_per_voter_budget,outcome_size,change_metric,millis"
    );
    assert!(lines[4].starts_with("summary,"));
}

#[test]
fn tie_order_changes_priorities() {
    let dir = setup();
    std::fs::write(dir.path().join("order.txt"), "p3\np2\np1\n").unwrap();
    // with p3 outranking p2, the b=6 run keeps p3 over the p2 swap
    let with_order = ames(
        &[
            "run", "tie.pb", "--budget", "6", "--tie-order", "order.txt", "--tie-consistent",
            "--json",
        ],
        dir.path(),
    );
    assert!(with_order.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&with_order)).unwrap();
    assert_eq!(v["outcome"], serde_json::json!(["p1", "p3"]));
}

#[test]
fn budget_override_is_applied() {
    let dir = setup();
    let out = ames(&["run", "tie.pb", "--budget", "6", "--json"], dir.path());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["outcome"], serde_json::json!(["p1", "p2"]));
}
