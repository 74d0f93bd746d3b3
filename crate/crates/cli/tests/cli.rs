use std::process::{Command, Output};

fn fibtower(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fibtower"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn scalar_commands() {
    for (args, expected) in [
        (&["pisano", "4"][..], "6"),
        (&["pisano", "10", "--method", "brute"], "60"),
        (&["pisano", "3001", "--method", "factored"], "100"),
        (&["fib", "0"], "0"),
        (&["fib", "10"], "55"),
        (&["fibmod", "91", "4"], "1"),
        (&["fibmod", "0", "1"], "0"),
    ] {
        let out = fibtower(args);
        assert_eq!(code(&out), 0, "{args:?}");
        assert_eq!(stdout(&out).trim(), expected, "{args:?}");
    }
}

#[test]
fn analyze_json_report() {
    let out = fibtower(&["analyze", "2", "5", "1", "--json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["unit_residue"], "1");
    assert_eq!(v["expected_valuation"], "2");
    assert_eq!(v["case"], "UNIT_ONE");
    assert_eq!(v["match"], true);
    assert_eq!(v["exact"], true);
    assert_eq!(v["chain"]["verified"], true);
}

#[test]
fn analyze_table_for_n_three_is_not_a_mismatch() {
    let out = fibtower(&["analyze", "3", "3", "1"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("exact                false"), "{text}");
    assert!(text.contains("match                true"), "{text}");
}

#[test]
fn analyze_outside_formula_range() {
    let out = fibtower(&["analyze", "1", "7", "2", "--json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["case"], "OUT_OF_RANGE");
    assert_eq!(v["predicted_residue"], serde_json::Value::Null);
    assert_eq!(v["match"], serde_json::Value::Null);
}

#[test]
fn sweep_writes_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let csv = dir.path().join("r.csv");
    let p = |p: &std::path::Path| p.to_str().unwrap().to_owned();
    let out = fibtower(&["sweep", "--k", "1..=3", "--n", "3..=6", "--m", "1..=2", "--out", &p(&json)]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&json).unwrap()).unwrap();
    assert_eq!(v["summary"]["rows"], "24");
    assert_eq!(v["summary"]["ok"], "24");

    let out = fibtower(&[
        "sweep", "--k", "2", "--n", "5", "--m", "1", "--format", "csv", "--out", &p(&csv),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("n,k,m,fn,expected_valuation,divisibility_ok,unit_residue,exact,case,predicted_residue,match,status")
    );
    assert_eq!(lines.next(), Some("5,2,1,5,2,true,1,true,UNIT_ONE,1,true,ok"));
    assert_eq!(lines.next(), None);
}

#[test]
fn sweep_is_deterministic_across_jobs() {
    let args = |jobs: &'static str| ["sweep", "--k", "1..=6", "--n", "1..=25", "--m", "1..=3", "--jobs", jobs];
    let one = fibtower(&args("1"));
    let eight = fibtower(&args("8"));
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, eight.stdout);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["sweep", "--k", "3..2", "--n", "5", "--m", "1"][..],
        &["fib", "abc"],
        &["analyze", "0", "5", "1"],
        &["fibmod", "3", "0"],
        &["frobnicate"],
    ] {
        assert_eq!(code(&fibtower(args)), 2, "{args:?}");
    }
}

#[test]
fn budget_errors_exit_three() {
    assert_eq!(code(&fibtower(&["fib", "60000000"])), 3);
}

#[test]
fn verify_identities() {
    let out = fibtower(&["verify", "--suite", "identities"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("7/7 identity families pass"));
}

#[test]
fn oracle_budget_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_fibtower"))
        .args(["verify", "--suite", "oracle"])
        .env("FIBTOWER_MAX_INDEX", "1000")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("3/3 oracle properties pass"), "{text}");
    assert!(!text.contains("(154 cases)"), "{text}");
}
