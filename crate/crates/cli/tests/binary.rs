//! Exit codes and output formats of the `forcelab` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
}

fn forcelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_forcelab"))
        .args(args)
        .output()
        .unwrap()
}

fn run(name: &str, extra: &[&str]) -> Output {
    let path = scenario(name);
    let mut args = vec!["run", "--scenario", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    forcelab(&args)
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let path = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn passing_scenario_exits_zero() {
    let out = run("p3.basics.forcelab", &[]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.starts_with("# scenario p3.basics\n# seed 0\n"),
        "{text}"
    );
    assert!(text
        .lines()
        .filter(|l| l.starts_with("RESULT"))
        .all(|l| l.contains(" PASS")));
}

#[test]
fn failing_scenario_exits_one() {
    let out = run("broken-projection.forcelab", &[]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.lines()
            .any(|l| l.contains(" FAIL") && l.contains("witness=")),
        "{text}"
    );
}

#[test]
fn empty_scenario_exits_zero() {
    let out = run("empty.forcelab", &[]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!String::from_utf8(out.stdout).unwrap().contains("RESULT"));
}

#[test]
fn bad_input_exits_two() {
    let missing = run("no-such-file.forcelab", &[]);
    assert_eq!(missing.status.code(), Some(2));

    let bad = scratch(
        "unbalanced.forcelab",
        "(scenario x\n  (ground (vstage 2))\n",
    );
    let out = forcelab(&["run", "--scenario", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("error:"));

    let dangling = scratch("dangling.forcelab", "(scenario x\n  (query q (size Q)))\n");
    assert_eq!(
        forcelab(&["check", dangling.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );

    assert_eq!(
        run("suites.forcelab", &["--suite", "no-such-suite"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(forcelab(&["run"]).status.code(), Some(2));
}

#[test]
fn check_reports_task_count() {
    let path = scenario("p3.basics.forcelab");
    let out = forcelab(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .starts_with("ok p3.basics ("));
}

#[test]
fn jsonl_has_one_record_per_result_line() {
    let text = String::from_utf8(run("p3.basics.forcelab", &[]).stdout).unwrap();
    let jsonl =
        String::from_utf8(run("p3.basics.forcelab", &["--format", "jsonl"]).stdout).unwrap();
    let results = text.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(jsonl.lines().count(), results);
    for line in jsonl.lines() {
        let record: forcelab::Record = serde_json::from_str(line).unwrap();
        assert!(text.contains(&record.text_line()));
    }
}

#[test]
fn timing_is_opt_in() {
    let plain = String::from_utf8(run("p3.basics.forcelab", &[]).stdout).unwrap();
    assert!(!plain.contains("time_ms="));
    let timed = String::from_utf8(run("p3.basics.forcelab", &["--timing"]).stdout).unwrap();
    assert!(timed
        .lines()
        .filter(|l| l.starts_with("RESULT"))
        .all(|l| l.contains("time_ms=")));
}

#[test]
fn suite_filter_keeps_only_named_suites() {
    let out = run("suites.forcelab", &["--suite", "completion-iso"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let suites: Vec<&str> = text.lines().filter(|l| l.starts_with("# suite ")).collect();
    assert_eq!(suites.len(), 1, "{text}");
    assert!(suites[0].starts_with("# suite completion-iso:"));
}
