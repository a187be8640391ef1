use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ebmatch::records::{read_trials, write_trials};

fn ebmatch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ebmatch")).args(args).env_remove("EB_SEED").output().expect("binary runs")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn write(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn square_corners_tour_costs_four() {
    let dir = tempfile::tempdir().unwrap();
    let x = write(dir.path(), "x.csv", "0,0\n1,1\n");
    let y = write(dir.path(), "y.csv", "1,0\n0,1\n");
    let out = ebmatch(&["solve-one", "--problem", "tsp", "--p", "2", "--x", &x, "--y", &y]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let stdout = text(&out.stdout);
    assert!(stdout.starts_with("cost 4\n"), "{stdout}");
    assert!(stdout.ends_with("side1_index,side2_index\n0,0\n0,1\n1,0\n1,1\n"), "{stdout}");
}

#[test]
fn exponent_below_one_is_a_usage_error() {
    let out = ebmatch(&["run-scaling", "--p", "0.5", "--n-list", "10", "--trials", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("`p`"), "{}", text(&out.stderr));
}

#[test]
fn unknown_flags_and_malformed_numbers_exit_two() {
    assert_eq!(ebmatch(&["run-scaling", "--colour", "red"]).status.code(), Some(2));
    let out = ebmatch(&["run-scaling", "--trials", "x"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("`trials`"));
    assert_eq!(ebmatch(&["run-scaling", "--config", "/nonexistent/file.conf"]).status.code(), Some(2));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write(dir.path(), "run.conf", "# test fixture\ntrials = 3\nn-list = 20,40\nd = 3\n");
    let output = dir.path().join("out");
    let out = ebmatch(&["run-scaling", "--config", &conf, "--trials", "2", "--output", output.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let records = read_trials(fs::File::open(output.join("trials.csv")).unwrap()).unwrap();
    assert_eq!(records.len(), 4);
    assert!(records.iter().all(|r| r.d == 3));
    let lines = fs::read_to_string(output.join("summary.jsonl")).unwrap();
    assert_eq!(lines.lines().count(), 2);
    assert!(lines.starts_with("{\"n\":20,"));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write(dir.path(), "run.conf", "trails = 3\n");
    let out = ebmatch(&["run-scaling", "--config", &conf]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("`trails`"));
}

#[test]
fn unwritable_output_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = write(dir.path(), "file", "");
    let target = format!("{blocker}/out");
    let out = ebmatch(&["run-scaling", "--n-list", "10", "--trials", "2", "--output", &target]);
    assert_eq!(out.status.code(), Some(4), "{}", text(&out.stderr));
}

#[test]
fn exact_requests_over_the_cap_exit_three_with_a_hint() {
    let dir = tempfile::tempdir().unwrap();
    let output = dir.path().join("out");
    let out = ebmatch(&[
        "run-scaling", "--problem", "tsp", "--solver", "exact", "--n-list", "20", "--trials", "2", "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(text(&out.stderr).contains("hint:"));
    assert!(!output.exists());
}

#[test]
fn worker_count_does_not_change_the_csv() {
    let dir = tempfile::tempdir().unwrap();
    let run = |workers: &str| {
        let output = dir.path().join(format!("w{workers}"));
        let out = ebmatch(&[
            "run-scaling", "--problem", "kmst:3", "--n-list", "10,20,40", "--trials", "5", "--seed", "5", "--workers", workers,
            "--output", output.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
        fs::read(output.join("trials.csv")).unwrap()
    };
    let one = run("1");
    assert_eq!(one, run("3"));
    let records = read_trials(one.as_slice()).unwrap();
    let mut again = Vec::new();
    write_trials(&mut again, &records).unwrap();
    assert_eq!(again, one);
}

#[test]
fn seed_comes_from_the_environment_when_not_given() {
    let dir = tempfile::tempdir().unwrap();
    let output = dir.path().join("out");
    let out = Command::new(env!("CARGO_BIN_EXE_ebmatch"))
        .args(["run-scaling", "--n-list", "10", "--trials", "1", "--output", output.to_str().unwrap()])
        .env("EB_SEED", "1234")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let records = read_trials(fs::File::open(output.join("trials.csv")).unwrap()).unwrap();
    assert_eq!(records[0].seed, 1234);
}

#[test]
fn every_experiment_command_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 5] = [
        &["run-d2log", "--n-list", "64,128", "--trials", "3"],
        &["run-subadditivity", "--d", "2", "--side", "3", "--trials", "3"],
        &["run-growth", "--problem", "tsp", "--n-list", "20,40", "--trials", "2", "--layout", "adversarial"],
        &["run-concentration", "--n-list", "20,40", "--trials", "100", "--d", "3"],
        &["run-mixture", "--n-list", "50,100", "--trials", "3", "--h-rule", "zero"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let output = dir.path().join(format!("run{i}"));
        let mut full: Vec<&str> = args.to_vec();
        full.extend(["--output", output.to_str().unwrap()]);
        let out = ebmatch(&full);
        assert!(matches!(out.status.code(), Some(0) | Some(1)), "{args:?}: {}", text(&out.stderr));
        for file in ["trials.csv", "summary.jsonl", "report.json"] {
            assert!(output.join(file).exists(), "{args:?} wrote no {file}");
        }
        read_trials(fs::File::open(output.join("trials.csv")).unwrap()).unwrap();
    }
}

#[test]
fn verify_oracles_passes() {
    let out = ebmatch(&["verify-oracles", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}{}", text(&out.stdout), text(&out.stderr));
    assert_eq!(text(&out.stdout).lines().filter(|l| l.ends_with(": ok")).count(), 3);
}

#[test]
fn grid_density_and_polycube_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write(dir.path(), "grid.csv", "grid 2 2 0.5 1\n0,0,0.5\n1,0,1\n0,1,1\n1,1,1.5\n");
    let output = dir.path().join("holder");
    let out = ebmatch(&[
        "run-scaling", "--d", "2", "--density", &format!("holder:{grid}"), "--n-list", "20", "--trials", "2", "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let shape = write(dir.path(), "l.txt", "# L shape\n0 0 1 1\n1 0 2 1\n0 1 1 2\n");
    let output = dir.path().join("poly");
    let out = ebmatch(&[
        "run-scaling", "--d", "2", "--domain", &format!("polycube:{shape}"), "--n-list", "20", "--trials", "2", "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let out = ebmatch(&["run-scaling", "--d", "2", "--domain", &format!("polycube:{shape}"), "--density", &format!("holder:{grid}")]);
    assert_eq!(out.status.code(), Some(2));
}
