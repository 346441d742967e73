mod common;

use std::process::{Command, Output};

use common::data;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fullrank")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(name: &str) -> String {
    data(name).display().to_string()
}

#[test]
fn solve_reports_summary() {
    let o = run(&["solve", &path("lrc5.lrc")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).starts_with("3 charsets, 24 solutions, search space 64, "), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("charset k=1 df=3\nx2 + x1\nx3 + x1 + 1\nx5 + x4 + 1\n----\n"));

    let o = run(&["solve", &path("mixed_network.net")]);
    assert!(stderr(&o).starts_with("33 charsets, 156 solutions, search space 41472, "), "{}", stderr(&o));
}

#[test]
fn solve_small_system_prints_both_charsets() {
    let o = run(&["solve", &path("small_system.sys")]);
    assert_eq!(
        stdout(&o),
        "charset k=1 df=1\nx1 + 1\nx3 + 1\nx4 + 1\nx5 + 1\nx6 + 1\n----\n\
         charset k=2 df=0\nx1\nx2 + 1\nx3 + 1\nx4 + 1\nx5 + 1\nx6 + 1\n"
    );
}

#[test]
fn output_is_identical_across_workers_and_runs() {
    let a = run(&["solve", "--workers", "1", "--incremental", &path("mixed_network.net")]);
    let b = run(&["solve", "--workers", "4", "--incremental", &path("mixed_network.net")]);
    let c = run(&["solve", "--workers", "4", "--incremental", &path("mixed_network.net")]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(b.stdout, c.stdout);
    let r1 = run(&["solve", "--choose", "rand:7", &path("mixed_network.net")]);
    let r2 = run(&["solve", "--choose", "rand:7", &path("mixed_network.net")]);
    assert_eq!(r1.stdout, r2.stdout);
}

#[test]
fn count_matches_library() {
    let o = run(&["count", &path("mixed_network.net")]);
    assert_eq!(stdout(&o), "156\n");
    let o = run(&["count", "--broadcast", "equations", "--incremental", &path("mixed_network.net")]);
    assert_eq!(stdout(&o), "156\n");
}

#[test]
fn verify_passes_and_catches_corruption() {
    let o = run(&["verify", &path("mixed_network.net")]);
    assert_eq!(stdout(&o), "PASS: 156 feasible points over 41472 candidates\n");
    let o = run(&["verify", &path("small_system.sys")]);
    assert_eq!(stdout(&o), "PASS: 3 feasible points over 64 candidates\n");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cs");
    std::fs::write(&bad, "charset k=1 df=3\nx2 + x1\nx3 + x1 + 1\nx5 + x4\n").unwrap();
    let o = run(&["verify", "--charsets", bad.to_str().unwrap(), &path("lrc5.lrc")]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.starts_with("FAIL: oracle 24 points, charsets 8; missing "), "{out}");
    assert!(out.contains("; extra "));
}

#[test]
fn check_reports_feasibility_and_objective() {
    let o = run(&["check", &path("lrc25.lrc"), &path("lrc25_optimum.txt")]);
    assert_eq!(stdout(&o), "feasible, objective 5\n");
    assert_eq!(o.status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let zero = dir.path().join("zero.txt");
    std::fs::write(&zero, "000000\n").unwrap();
    let o = run(&["check", &path("lrc5.lrc"), zero.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("infeasible (rank block"), "{}", stdout(&o));
}

#[test]
fn optimize_small_lrc() {
    let o = run(&["optimize", &path("lrc5.lrc")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("optimum 2"));
    assert_eq!(lines.next(), Some("optimal points 6"));
    assert_eq!(lines.count(), 6);

    let o = run(&["optimize", "--weights", "1,1,1,1,1,0", &path("lrc5.lrc")]);
    assert!(stdout(&o).starts_with("optimum 1\n"), "{}", stdout(&o));
}

#[test]
fn optimize_large_df_is_a_budget_error() {
    let o = run(&["optimize", &path("lrc25.lrc")]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("export-wcnf"));
}

#[test]
fn export_wcnf_writes_one_file_per_charset() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w");
    let o = run(&["export-wcnf", "--out", out.to_str().unwrap(), &path("lrc5.lrc")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 3);
    let text = std::fs::read_to_string(out.join("charset_1.wcnf")).unwrap();
    assert!(text.starts_with("p wcnf 6 "));
    assert!(text.lines().next().unwrap().ends_with(" 7"));
    let map = std::fs::read_to_string(out.join("charset_1.map")).unwrap();
    assert!(map.starts_with("orig x1 -> wcnf 1\n"));

    let o = run(&["export-wcnf", &path("lrc5.lrc")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn enumerate_respects_limit() {
    let o = run(&["enumerate", "--limit", "5", &path("lrc5.lrc")]);
    assert_eq!(stdout(&o).lines().count(), 5);
    let o = run(&["enumerate", &path("lrc5.lrc")]);
    assert_eq!(stdout(&o).lines().count(), 24);
    let o = run(&["enumerate", &path("lrc25.lrc")]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.sys");
    std::fs::write(&bad, "system\nn = 2\nv = 1\n[rank-block 1]\nx1*x3 +\n").unwrap();
    let o = run(&["solve", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 5"), "{}", stderr(&o));

    let o = run(&["solve", "/nonexistent/input"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["solve", "--choose", "bogus", &path("lrc5.lrc")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn infeasible_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("inf.sys");
    std::fs::write(&f, "system\nn = 1\nv = 2\n[rank-block 1]\nx1*x2 + x1*x3\n").unwrap();
    let o = run(&["solve", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("0 charsets, 0 solutions"));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("cs.txt");
    let o = run(&["solve", "--out", f.to_str().unwrap(), &path("lrc5.lrc")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&f).unwrap();
    assert_eq!(text.matches("charset k=").count(), 3);
}

#[test]
fn trace_goes_to_stderr() {
    let o = run(&["solve", "--trace", &path("small_system.sys")]);
    assert!(stderr(&o).lines().next().unwrap().starts_with("SPLIT var=9 "));
}
