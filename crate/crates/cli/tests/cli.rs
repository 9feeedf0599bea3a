use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const PENDANT_PAIR: &str = "t # 1\nv 1 A\nv 2 A\nv 3 A\nv 4 B\ne 1 2 a\ne 2 3 a\ne 3 1 a\ne 2 4 b\n\
                        t # 2\nv 1 A\nv 2 A\nv 3 A\nv 4 B\ne 1 2 a\ne 2 3 a\ne 3 1 a\ne 3 4 b\n";

fn fsm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fsm")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn mine_pendant_pair_writes_result_and_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("g.tlf");
    let output = dir.path().join("out.tsv");
    let metrics = dir.path().join("metrics.txt");
    fs::write(&input, PENDANT_PAIR).unwrap();
    let out = fsm(&[
        "mine", "--input", path(&input), "--min-support", "0.5", "--undirected",
        "--output", path(&output), "--metrics", path(&metrics),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let result = fs::read_to_string(&output).unwrap();
    assert!(result.contains("0,1,A,out,a,A;1,2,A,out,a,A;2,0,A,out,a,A\t2\t1.000000\n"), "{result}");
    assert!(result.contains("0,1,A,out,a,A;1,2,A,out,a,A;2,0,A,out,a,A;2,3,A,out,b,B\t2\t1.000000\n"), "{result}");
    let report = fs::read_to_string(&metrics).unwrap();
    assert!(report.contains("iteration k=1"));
    assert!(report.contains("total "));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("g.tlf");
    let gen = fsm(&["generate", "--count", "30", "--seed", "4", "--output", path(&input)]);
    assert!(gen.status.success());
    let again = fsm(&["generate", "--count", "30", "--seed", "4"]);
    assert_eq!(fs::read(&input).unwrap(), again.stdout);
    let run = || fsm(&["mine", "--input", path(&input), "--min-support", "0.8", "--workers", "3"]).stdout;
    let first = run();
    assert!(!first.is_empty());
    assert_eq!(first, run());
}

#[test]
fn check_agrees_with_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("small.tlf");
    fs::write(&input, PENDANT_PAIR).unwrap();
    for mode in ["--directed", "--undirected"] {
        let out = fsm(&["check", "--input", path(&input), "--min-frequency", "1", mode]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
        assert!(String::from_utf8_lossy(&out.stdout).starts_with("identical"));
    }
    let gen = dir.path().join("gen.tlf");
    assert!(fsm(&["generate", "--count", "20", "--output", path(&gen)]).status.success());
    let out = fsm(&["check", "--input", path(&gen), "--min-support", "1.0", "--prefilter", "--compress", "patterns,graphs"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn oracle_subcommand_matches_mine() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("g.tlf");
    fs::write(&input, PENDANT_PAIR).unwrap();
    let mined = fsm(&["mine", "--input", path(&input), "--min-frequency", "2"]);
    let oracle = fsm(&["oracle", "--input", path(&input), "--min-frequency", "2"]);
    assert!(mined.status.success() && oracle.status.success());
    assert_eq!(mined.stdout, oracle.stdout);
}

#[test]
fn oracle_guard_refusal_fails() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("big.tlf");
    assert!(fsm(&["generate", "--count", "10", "--output", path(&input)]).status.success());
    let out = fsm(&["oracle", "--input", path(&input), "--min-frequency", "1"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("graph 0"), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn usage_errors() {
    let both = fsm(&["mine", "--input", "g.tlf", "--min-support", "0.5", "--min-frequency", "2"]);
    assert!(!both.status.success());
    assert!(String::from_utf8_lossy(&both.stderr).contains("cannot be used with"));
    assert!(!fsm(&["mine", "--input", "g.tlf"]).status.success());
    assert!(!fsm(&["mine", "--input", "g.tlf", "--min-frequency", "1", "--compress", "zip"]).status.success());
    assert!(!fsm(&["frobnicate"]).status.success());
}

#[test]
fn missing_input_reports_path() {
    let out = fsm(&["mine", "--input", "/nonexistent/g.tlf", "--min-frequency", "1"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/g.tlf"));
}
