//! End-to-end tests of the command-line binary: exit codes, output
//! determinism, diagnostics, replay round trips.

use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name);
    p.to_str().unwrap().to_string()
}

fn forge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tmc-forge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn transform_succeeds_and_is_deterministic() {
    let a = forge(&["transform", "--pass", "tmc", &corpus("map.dl")]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert!(stdout(&a).contains("fun map.dps"));
    let b = forge(&["transform", "--pass", "tmc", &corpus("map.dl")]);
    assert_eq!(a.stdout, b.stdout, "byte-identical reruns");
}

#[test]
fn parse_round_trips_through_the_printer() {
    let once = forge(&["parse", &corpus("merge.dl")]);
    assert_eq!(once.status.code(), Some(0));
    // feeding the printed output back yields the same bytes
    let tmp = std::env::temp_dir().join("merge_reprint.dl");
    std::fs::write(&tmp, &once.stdout).unwrap();
    let twice = forge(&["parse", tmp.to_str().unwrap()]);
    assert_eq!(once.stdout, twice.stdout);
}

#[test]
fn ambiguous_transform_exits_one_with_the_disambiguation_message() {
    let out = forge(&["transform", &corpus("tree_map.dl")]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("may be TMC-transformed"), "{err}");
    assert!(err.contains("[@tailcall]"), "{err}");
}

#[test]
fn missing_file_is_a_usage_error() {
    let out = forge(&["transform", "no/such/file.dl"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn syntax_error_is_a_usage_error() {
    let tmp = std::env::temp_dir().join("broken.dl");
    std::fs::write(&tmp, "fun oops =").unwrap();
    let out = forge(&["parse", tmp.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = forge(&["transform", "--frobnicate", &corpus("map.dl")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_prints_the_converged_value_and_stats() {
    let out = forge(&[
        "run",
        &corpus("map.dl"),
        "--fn",
        "map",
        "--arg",
        "(&not, [true, false])",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let s = stdout(&out);
    assert!(s.contains("converged: false :: true :: ()"), "{s}");
    assert!(s.contains("max_frames"), "{s}");
}

#[test]
fn run_with_ints_and_seeded_scheduler() {
    let out = forge(&[
        "run",
        &corpus("sum.dl"),
        "--fn",
        "sum",
        "--arg",
        "[4, -1, 5]",
        "--scheduler",
        "seed:7",
        "--ints",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("converged: 8"), "{}", stdout(&out));
}

#[test]
fn trace_emits_one_line_per_step() {
    let out = forge(&[
        "run",
        &corpus("dup.dl"),
        "--fn",
        "dup",
        "--arg",
        "[]",
        "--trace",
    ]);
    let s = stdout(&out);
    let steps: Vec<&str> = s.lines().filter(|l| l.starts_with(char::is_numeric)).collect();
    assert!(!steps.is_empty());
    assert!(steps[0].contains("Step"), "{s}");
}

#[test]
fn check_reports_refines_with_json_schema() {
    let out = forge(&["check", &corpus("dup.dl"), "--sizes", "0..3", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["verdict"], "refines");
    assert!(v["schedules"].as_u64().unwrap() > 0);
    assert!(v.get("replay").is_some());
}

#[test]
fn behaviors_lists_distinct_outcomes() {
    let out = forge(&[
        "behaviors",
        &corpus("dup.dl"),
        "--fn",
        "dup",
        "--arg",
        "[true]",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("distinct behavior"), "{}", stdout(&out));
}

#[test]
fn contexts_classifies_corpus_calls() {
    let out = forge(&["contexts", &corpus("filter.dl")]);
    assert_eq!(out.status.code(), Some(0));
    let s = stdout(&out);
    assert!(s.contains("tmc"), "{s}");
    assert!(s.contains("tail"), "{s}");
}

#[test]
fn bench_prints_per_size_rows() {
    let out = forge(&[
        "bench",
        &corpus("dup.dl"),
        "--fn",
        "dup",
        "--sizes",
        "10,20",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let s = stdout(&out);
    assert_eq!(s.lines().count(), 3, "{s}");
    assert!(s.lines().nth(1).unwrap().starts_with("10\t"), "{s}");
}

#[test]
fn fuzz_small_batch_passes() {
    let dir = std::env::temp_dir().join("forge_fuzz_cli");
    let out = forge(&[
        "fuzz",
        "--seeds",
        "5",
        "--sizes",
        "0..2",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("0 violation(s)"));
}

#[test]
fn replay_files_reproduce_through_check() {
    use tmc_forge::lang::*;
    use tmc_forge::refine::{write_replay, Observation, Replay};
    use tmc_forge::tmc::{transform_program, TransformOptions};

    let text = std::fs::read_to_string(corpus("map.dl")).unwrap();
    let source = parse_program(&text).unwrap();
    let target = transform_program(&source, TransformOptions::default()).unwrap();
    // sabotage the target so the replay captures a genuine violation
    let target =
        parse_program(&print_program(&target).replace("f(y) :: ()", "true :: ()")).unwrap();
    let replay = Replay {
        source,
        target,
        fn_name: "map".into(),
        arg: Expr::pair(Expr::fnptr("not"), Expr::cons(Expr::bool(true), Expr::nil())),
        bits: Vec::new(),
        obs: Observation::Deep,
    };
    let path = std::env::temp_dir().join("violation.replay");
    std::fs::write(&path, write_replay(&replay)).unwrap();

    let out = forge(&["check", "--replay", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    assert!(stdout(&out).contains("violation"), "{}", stdout(&out));
}
