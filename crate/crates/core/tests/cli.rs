use levelring::verify::CheckReport;
use serde_json::Value;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_levelring")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

#[test]
fn group_info_counts_maximal_subgroups() {
    let v = json(&["group-info", "--group", "4,2", "--p", "2"]);
    assert_eq!(v["order"], 8);
    assert_eq!(v["maximal_subgroup_count"], 3);
    let t = json(&["group-info", "--group", "1", "--p", "3"]);
    assert_eq!(t["order"], 1);
    assert_eq!(t["maximal_subgroup_count"], 0);
}

#[test]
fn bad_group_spec_is_a_usage_error() {
    let out = run(&["group-info", "--group", "6", "--p", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not a power of p"));
}

#[test]
fn fibers_of_z2() {
    let v = json(&["fibers", "--group", "2", "--loops", "1"]);
    let rows = v["rows"].as_array().unwrap();
    let pairs: Vec<(u64, u64)> =
        rows.iter().map(|r| (r["rank"].as_u64().unwrap(), r["level_count"].as_u64().unwrap())).collect();
    assert_eq!(pairs, vec![(1, 1), (2, 2)]);
}

#[test]
fn fibers_of_klein_four_show_torsion() {
    let v = json(&["fibers", "--group", "2,2", "--loops", "1"]);
    let zero = &v["rows"][0];
    assert_eq!(zero["rank"], 0);
    assert_eq!(zero["invariant_factors"], serde_json::json!(["2"]));
}

#[test]
fn fibers_without_loops_is_one_row() {
    let v = json(&["fibers", "--group", "4,2", "--loops", "0"]);
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
}

#[test]
fn verify_exit_codes() {
    assert_eq!(run(&["verify", "f2"]).status.code(), Some(0));
    assert_eq!(run(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["verify"]).status.code(), Some(2));
}

#[test]
fn verify_fiber_rank_on_z4() {
    let v = json(&["verify", "fiber-rank", "--group", "4", "--loops", "1"]);
    let reports: Vec<CheckReport> = serde_json::from_value(v).unwrap();
    assert_eq!(reports.len(), 1);
    assert!(reports[0].is_pass());
    assert_eq!(reports[0].lhs["per_f"].as_array().unwrap().len(), 4);
}

#[test]
fn report_json_round_trips() {
    let v = json(&["verify", "f2", "cyclic", "--max-order", "9"]);
    let reports: Vec<CheckReport> = serde_json::from_value(v).unwrap();
    let again: Vec<CheckReport> = serde_json::from_str(&serde_json::to_string(&reports).unwrap()).unwrap();
    assert_eq!(reports, again);
}

#[test]
fn output_does_not_depend_on_threads() {
    let one = run(&["fibers", "--group", "4,2", "--loops", "1", "--threads", "1"]);
    let two = run(&["fibers", "--group", "4,2", "--loops", "1", "--threads", "2"]);
    assert_eq!(one.stdout, two.stdout);
}

#[test]
fn budget_refusal() {
    let out = run(&["level-count", "--group", "2,2", "--loops", "1", "--budget", "10"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn mode_and_height_must_agree() {
    assert_eq!(run(&["fibers", "--group", "2", "--n", "2"]).status.code(), Some(2));
    assert_eq!(run(&["fibers", "--group", "2", "--budget", "0"]).status.code(), Some(2));
}

#[test]
fn suite_manifest_runs() {
    let dir = std::env::temp_dir().join(format!("levelring-suite-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("suite.toml");
    std::fs::write(&path, "[[check]]\nname = \"f2\"\n\n[[check]]\nname = \"oracle\"\ngroup = \"4\"\np = 2\n").unwrap();
    let out = run(&["verify", "--suite", path.to_str().unwrap(), "--format", "md"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("| f2 |") && text.contains("| oracle |"));
    std::fs::remove_dir_all(&dir).ok();
}
