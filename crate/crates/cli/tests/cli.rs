use std::path::Path;
use std::process::{Command, Output};

use hpppt_cli::bench::{BENCH_HEADER, SUMMARY_HEADER};
use hpppt_cli::missions::{EXPLORE_HEADER, LIFELONG_HEADER};

fn hpppt(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hpppt"))
        .current_dir(dir)
        .env_remove("HPPPT_TIME_LIMIT_SECS")
        .args(args)
        .output()
        .unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn gen(dir: &Path, sizes: &str, count: &str) {
    let out = hpppt(dir, &["gen", "--sizes", sizes, "--count", count, "--seed", "7", "--out", "inst"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

/// Low probabilities keep the remaining mass high along every path, so the
/// uninformed search cannot finish a large instance early.
fn gen_hard(dir: &Path) {
    let out = hpppt(dir, &["gen", "--sizes", "120", "--count", "1", "--p-max", "0.05", "--out", "inst"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn gen_writes_one_file_per_size_and_index() {
    let tmp = tempfile::tempdir().unwrap();
    gen(tmp.path(), "10..40:10", "20");
    let files = std::fs::read_dir(tmp.path().join("inst")).unwrap().count();
    assert_eq!(files, 80);
    let first = std::fs::read(tmp.path().join("inst/rand_n010_00.hpt")).unwrap();
    gen(tmp.path(), "10..40:10", "20");
    assert_eq!(first, std::fs::read(tmp.path().join("inst/rand_n010_00.hpt")).unwrap());
}

#[test]
fn frpt_sweep_size_list() {
    let tmp = tempfile::tempdir().unwrap();
    gen(tmp.path(), "10..200:10", "5");
    assert_eq!(std::fs::read_dir(tmp.path().join("inst")).unwrap().count(), 100);
}

#[test]
fn solve_agrees_with_oracle_and_ablation_costs_match() {
    let tmp = tempfile::tempdir().unwrap();
    gen(tmp.path(), "9", "3");
    for i in 0..3 {
        let file = format!("inst/rand_n009_0{i}.hpt");
        let rpt = json(&hpppt(tmp.path(), &["solve", "--solver", "rpt", "--eps", "0", &file]));
        let oracle = json(&hpppt(tmp.path(), &["solve", "--solver", "oracle", &file]));
        let noh = json(&hpppt(tmp.path(), &["solve", "--no-heuristic", &file]));
        let (c, o, h) = (rpt["cost"].as_f64().unwrap(), oracle["cost"].as_f64().unwrap(), noh["cost"].as_f64().unwrap());
        assert!((c - o).abs() <= 1e-9);
        assert!((c - h).abs() <= 1e-9);
        assert!(noh["expansions"].as_u64() >= rpt["expansions"].as_u64());
        assert_eq!(rpt["status"], "ok");
        assert_eq!(rpt["path"].as_array().unwrap().len(), 9);
    }
}

#[test]
fn greedy_is_fast_on_large_instances() {
    let tmp = tempfile::tempdir().unwrap();
    gen(tmp.path(), "200", "1");
    let r = json(&hpppt(tmp.path(), &["solve", "--solver", "greedy", "inst/rand_n200_00.hpt"]));
    assert!(r["wall_ms"].as_f64().unwrap() < 1.0, "{}", r["wall_ms"]);
}

#[test]
fn timeout_is_a_status_not_a_crash() {
    let tmp = tempfile::tempdir().unwrap();
    gen_hard(tmp.path());
    let out = hpppt(
        tmp.path(),
        &["solve", "--no-heuristic", "--time-limit", "0.01", "inst/rand_n120_00.hpt"],
    );
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["status"], "timeout");
    assert!(r["cost"].is_null());
}

#[test]
fn time_limit_comes_from_the_environment() {
    let tmp = tempfile::tempdir().unwrap();
    gen_hard(tmp.path());
    let out = Command::new(env!("CARGO_BIN_EXE_hpppt"))
        .current_dir(tmp.path())
        .env("HPPPT_TIME_LIMIT_SECS", "0.01")
        .args(["solve", "--no-heuristic", "inst/rand_n120_00.hpt"])
        .output()
        .unwrap();
    assert_eq!(json(&out)["status"], "timeout");
}

#[test]
fn oracle_refusal_is_a_failed_run() {
    let tmp = tempfile::tempdir().unwrap();
    gen(tmp.path(), "13", "1");
    let out = hpppt(tmp.path(), &["solve", "--solver", "oracle", "inst/rand_n013_00.hpt"]);
    assert_eq!(out.status.code(), Some(1));
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["status"], "refused");
}

#[test]
fn configuration_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(hpppt(tmp.path(), &["solve", "missing.hpt"]).status.code(), Some(2));
    assert_eq!(hpppt(tmp.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(hpppt(tmp.path(), &["bench", "--solvers", "lkh"]).status.code(), Some(2));
    assert_eq!(hpppt(tmp.path(), &["gen", "--sizes", "5..1"]).status.code(), Some(2));
    assert_eq!(hpppt(tmp.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn empty_bench_writes_headers_only() {
    let tmp = tempfile::tempdir().unwrap();
    let out = hpppt(tmp.path(), &["bench", "--out", "b.csv"]);
    assert!(out.status.success());
    let rows = std::fs::read_to_string(tmp.path().join("b.csv")).unwrap();
    assert_eq!(rows, BENCH_HEADER.join(",") + "\n");
    let summary = std::fs::read_to_string(tmp.path().join("b.summary.csv")).unwrap();
    assert_eq!(summary, SUMMARY_HEADER.join(",") + "\n");
}

#[test]
fn headers_match_the_row_types() {
    let tmp = tempfile::tempdir().unwrap();
    gen(tmp.path(), "6", "1");
    let out = hpppt(tmp.path(), &["bench", "inst", "--solvers", "rpt", "--out", "b.csv"]);
    assert!(out.status.success());
    let first = |p: &str| std::fs::read_to_string(tmp.path().join(p)).unwrap().lines().next().unwrap().to_string();
    assert_eq!(first("b.csv"), BENCH_HEADER.join(","));
    assert_eq!(first("b.summary.csv"), SUMMARY_HEADER.join(","));
    let out = hpppt(tmp.path(), &["lifelong", "--out", "l.csv", "--planners", "greedy"]);
    assert!(out.status.success());
    assert_eq!(first("l.csv"), LIFELONG_HEADER.join(","));
    let world = "R....\n..#..\n....T\n";
    std::fs::write(tmp.path().join("w.map"), world).unwrap();
    let out = hpppt(tmp.path(), &["explore", "--world", "w.map", "--trials", "1", "--out", "e.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(first("e.csv"), EXPLORE_HEADER.join(","));
}

#[test]
fn bench_rows_are_ordered_and_rpt_is_cheapest() {
    let tmp = tempfile::tempdir().unwrap();
    gen(tmp.path(), "8..14:3", "2");
    let out = hpppt(
        tmp.path(),
        &["bench", "inst", "--solvers", "greedy,rpt,blind,rpt:0.2", "--reps", "2", "--jobs", "3", "--out", "b.csv"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut r = csv::Reader::from_path(tmp.path().join("b.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 6 * 4 * 2);
    let names: Vec<&str> = rows.iter().step_by(8).map(|r| &r[0]).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    for chunk in rows.chunks(8) {
        let solvers: Vec<&str> = chunk.iter().map(|r| &r[2]).collect();
        assert_eq!(solvers, ["greedy", "greedy", "rpt", "rpt", "blind", "blind", "rpt", "rpt"]);
        let exact: f64 = chunk[2][7].parse().unwrap();
        for row in chunk {
            assert_eq!(&row[6], "ok");
            assert!(exact <= row[7].parse::<f64>().unwrap() + 1e-9);
        }
        assert!((chunk[2][8].parse::<f64>().unwrap() - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn lifelong_noiseless_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let out = hpppt(
        tmp.path(),
        &["lifelong", "--noiseless", "--initial-belief", "0.5", "--trials", "3", "--seed", "2"],
    );
    assert!(out.status.success());
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 9);
    for row in &rows {
        assert_eq!(&row[6], "13", "one visit per vertex");
        assert_eq!(&row[7], &row[8], "classification equals truth");
        assert_eq!(&row[9], "0");
    }
}

#[test]
fn explore_saved_world_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |args: &[&str]| {
        let out = hpppt(tmp.path(), args);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        String::from_utf8(out.stdout).unwrap()
    };
    let generated = run(&["explore", "--world-seed", "3", "--save-world", "f.map", "--trials", "1", "--planners", "greedy"]);
    let loaded = run(&["explore", "--world", "f.map", "--trials", "1", "--planners", "greedy"]);
    let tail = |s: &str| s.lines().nth(1).unwrap().split_once(',').unwrap().1.to_string();
    assert_eq!(tail(&generated), tail(&loaded));
}
