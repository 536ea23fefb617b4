use serde_json::Value;
use slicecal::{enumerate_all, Instance, Schedule, SolveMode};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn slice_cal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slice-cal"))
        .args(args)
        .env_remove("SLICE_CAL_NODE_BUDGET")
        .output()
        .expect("binary runs")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn summary(output: &Output) -> Value {
    serde_json::from_slice(&output.stdout).expect("summary is JSON")
}

#[test]
fn generate_solve_validate_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("default_gen.json");
    let out = slice_cal(&["generate", "--config", cfg.to_str().unwrap(), "--out", &path(dir.path(), "inst.json")]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    for (algo, mode) in [("sra", "shared"), ("dra", "dedicated")] {
        let sched = path(dir.path(), &format!("{algo}.json"));
        let out = slice_cal(&["solve", "--instance", &path(dir.path(), "inst.json"), "--algo", algo, "--out", &sched]);
        assert!(out.status.success());
        let s = summary(&out);
        assert_eq!(s["feasible"], true);
        assert_eq!(s["mode"], mode);
        let out = slice_cal(&[
            "validate",
            "--instance",
            &path(dir.path(), "inst.json"),
            "--schedule",
            &sched,
            "--mode",
            mode,
        ]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(summary(&out)["feasible"], true);
    }
}

#[test]
fn exact_summary_matches_enumeration() {
    let dir = tempfile::tempdir().unwrap();
    let inst = path(dir.path(), "inst.json");
    let cfg = path(dir.path(), "small.json");
    std::fs::write(
        &cfg,
        r#"{"horizon": 4, "capacity": 3, "num_requests": 5, "tenant_shares": [0.5, 0.5],
            "arrival_range": [1, 4], "demand_range": [1, 3], "duration_range": [1, 3]}"#,
    )
    .unwrap();
    let out = slice_cal(&["generate", "--config", &cfg, "--seed", "11", "--out", &inst]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let instance = Instance::from_json(&std::fs::read_to_string(&inst).unwrap()).unwrap();
    assert_eq!(instance.requests.len(), 5);

    for mode in ["shared", "dedicated"] {
        let sched = path(dir.path(), "exact.json");
        let out = slice_cal(&["solve", "--instance", &inst, "--algo", "exact", "--mode", mode, "--out", &sched]);
        assert!(out.status.success());
        let s = summary(&out);
        let expected = enumerate_all(&instance, mode.parse::<SolveMode>().unwrap()).unwrap();
        assert_eq!(s["welfare"], expected);
        assert_eq!(s["proven_optimal"], true);
        let schedule = Schedule::from_json(&std::fs::read_to_string(&sched).unwrap()).unwrap();
        assert_eq!(schedule.accepted_count() as u64, expected);
    }
}

#[test]
fn sweep_writes_csv_over_request_counts() {
    let dir = tempfile::tempdir().unwrap();
    let spec = configs().join("requests_sweep.json");
    let csv = path(dir.path(), "requests.csv");
    let out = slice_cal(&["sweep", "--spec", spec.to_str().unwrap(), "--out", &csv, "--seeds-per-point", "4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 10 * 2);
    let points: Vec<&str> = lines[1..].iter().step_by(2).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(points, ["10", "20", "30", "40", "50", "60", "70", "80", "90", "100"]);
    assert!(lines[1..].iter().all(|l| l.starts_with("requests,") && l.contains(",4,")));

    let again = path(dir.path(), "again.csv");
    slice_cal(&["sweep", "--spec", spec.to_str().unwrap(), "--out", &again, "--seeds-per-point", "4"]);
    assert_eq!(std::fs::read(&csv).unwrap(), std::fs::read(&again).unwrap());

    let reseeded = path(dir.path(), "reseeded.csv");
    slice_cal(&["sweep", "--spec", spec.to_str().unwrap(), "--out", &reseeded, "--seeds-per-point", "4", "--seed", "99"]);
    assert_ne!(std::fs::read(&csv).unwrap(), std::fs::read(&reseeded).unwrap());
}

#[test]
fn usage_report_csv() {
    let out = slice_cal(&["usage-report", "--requests", "0", "--capacity", "50", "--seeds", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text,
        "requests,capacity,algorithm,seeds,tenant_usage_0,tenant_usage_1,tenant_usage_2\n\
         0,50,dra,3,0.0000,0.0000,0.0000\n\
         0,50,sra,3,0.0000,0.0000,0.0000\n"
    );
}

#[test]
fn malformed_json_exits_one_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let inst = path(dir.path(), "bad.json");
    std::fs::write(&inst, "{\n  \"horizon\": 4,\n  \"capacity\": ,\n}").unwrap();
    let out = slice_cal(&["solve", "--instance", &inst, "--algo", "sra", "--out", &path(dir.path(), "s.json")]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3 column"), "{err}");
    assert!(!dir.path().join("s.json").exists());
}

#[test]
fn invalid_field_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let inst = path(dir.path(), "inst.json");
    std::fs::write(
        &inst,
        r#"{"horizon": 4, "capacity": 2, "tenants": [{"id": 0, "reserved": 2}],
            "requests": [{"id": 0, "tenant": 0, "slice": "EMBB", "arrival": 1, "demand": 0, "duration": 1}]}"#,
    )
    .unwrap();
    let out = slice_cal(&["solve", "--instance", &inst, "--algo", "dra", "--out", &path(dir.path(), "s.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("requests[0].demand"));

    let out = slice_cal(&["generate", "--shares", "0.5,0.2", "--out", &path(dir.path(), "g.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tenant_shares"));
}

#[test]
fn unknown_algorithm_lists_names() {
    let out = slice_cal(&["solve", "--instance", "x.json", "--algo", "greedy", "--out", "y.json"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("dra") && err.contains("sra") && err.contains("exact"), "{err}");
}

#[test]
fn exact_needs_mode_and_heuristics_keep_theirs() {
    let dir = tempfile::tempdir().unwrap();
    let inst = path(dir.path(), "inst.json");
    slice_cal(&["generate", "--requests", "3", "--out", &inst]);
    let sched = path(dir.path(), "s.json");
    let out = slice_cal(&["solve", "--instance", &inst, "--algo", "exact", "--out", &sched]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--mode"));
    let out = slice_cal(&["solve", "--instance", &inst, "--algo", "sra", "--mode", "dedicated", "--out", &sched]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn infeasible_schedule_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let inst = path(dir.path(), "inst.json");
    std::fs::write(
        &inst,
        r#"{"horizon": 5, "capacity": 2, "tenants": [{"id": 0, "reserved": 2, "share": 1.0}],
            "requests": [{"id": 0, "tenant": 0, "slice": "EMBBRLLC", "arrival": 3, "demand": 1, "duration": 1}]}"#,
    )
    .unwrap();
    let sched = path(dir.path(), "s.json");
    std::fs::write(&sched, r#"{"starts": {"0": 4}, "assignment": [{"slot": 4, "unit": 1, "request": 0}]}"#).unwrap();
    let report = path(dir.path(), "report.json");
    let out = slice_cal(&["validate", "--instance", &inst, "--schedule", &sched, "--out", &report]);
    assert_eq!(out.status.code(), Some(2));
    let value: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(value["feasible"], false);
    assert_eq!(value["violations"][0]["tag"], "ADMISSION");
}

#[test]
fn identical_invocations_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = path(dir.path(), "a.json");
    let b = path(dir.path(), "b.json");
    let c = path(dir.path(), "c.json");
    slice_cal(&["generate", "--seed", "5", "--out", &a]);
    slice_cal(&["generate", "--seed", "5", "--out", &b]);
    slice_cal(&["generate", "--seed", "6", "--out", &c]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());

    let sa = path(dir.path(), "sa.json");
    let sb = path(dir.path(), "sb.json");
    slice_cal(&["solve", "--instance", &a, "--algo", "sra", "--out", &sa]);
    slice_cal(&["solve", "--instance", &a, "--algo", "sra", "--out", &sb]);
    assert_eq!(std::fs::read(&sa).unwrap(), std::fs::read(&sb).unwrap());
}

#[test]
fn node_budget_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let inst = path(dir.path(), "inst.json");
    slice_cal(&["generate", "--requests", "30", "--out", &inst]);
    let out = Command::new(env!("CARGO_BIN_EXE_slice-cal"))
        .args(["solve", "--instance", &inst, "--algo", "exact", "--mode", "shared", "--out", &path(dir.path(), "s.json")])
        .env("SLICE_CAL_NODE_BUDGET", "50")
        .output()
        .unwrap();
    assert!(out.status.success());
    let s = summary(&out);
    assert_eq!(s["proven_optimal"], false);
    assert_eq!(s["feasible"], true);
    assert!(s["nodes_explored"].as_u64().unwrap() <= 50);

    let out = Command::new(env!("CARGO_BIN_EXE_slice-cal"))
        .args(["solve", "--instance", &inst, "--algo", "exact", "--mode", "shared", "--out", &path(dir.path(), "s.json")])
        .env("SLICE_CAL_NODE_BUDGET", "lots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
