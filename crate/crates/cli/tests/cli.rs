use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twostep")).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

fn small(dir: &Path) -> String {
    write_config(dir, "small.cfg", "n_paths = 4000\nrho_grid = -1:0.5:1\n")
}

#[test]
fn table2_csv_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["table2", "--config", &small(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.ends_with('\n'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "rho,best_estimate,std_error");
    assert_eq!(lines.len(), 6);
    assert!(lines[3].starts_with("0,1.00"));
    for l in &lines[1..] {
        assert_eq!(l.split(',').count(), 3);
        assert!(!l.contains(' '));
    }
}

#[test]
fn rho_flag_selects_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["table2", "--config", &small(dir.path()), "--rho", "-0.3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().starts_with("-0.3,"));
    assert_eq!(run(&["table2", "--rho", "1.5"]).status.code(), Some(2));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = run(&["coc", "--config", &cfg, "--seed", "3", "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let other = run(&["coc", "--config", &cfg, "--seed", "4"]).stdout;
    assert_ne!(std::fs::read(&a).unwrap(), other);
}

#[test]
fn coc_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "det.cfg", "n_paths = 2000\nxi = 0\nrho_grid = -1:0.5:1\n");
    let text = String::from_utf8(run(&["coc", "--config", &cfg]).stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("rho,best_estimate,scr,coc_value,bs_benchmark"));
    for l in lines {
        let f: Vec<&str> = l.split(',').collect();
        assert_eq!(f[2], "0", "{l}");
    }
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "bad.cfg", "c = 0.07\nbeta = -0.5\n");
    let out = run(&["table2", "--config", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`beta`"));

    let garbled = write_config(dir.path(), "garbled.cfg", "c = 0.07\n\nnot a pair\n");
    let out = run(&["table2", "--config", &garbled]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    assert_eq!(run(&["table2", "--config", "/nonexistent/x.cfg"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_2() {
    let out = run(&["examples", "--out", "/nonexistent/dir/out.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let ok = run(&["verify"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));
    assert!(String::from_utf8(ok.stdout).unwrap().lines().all(|l| l.starts_with("PASS ")));

    let a = run(&["verify", "--inject-negative-beta", "--seed", "7"]);
    let b = run(&["verify", "--inject-negative-beta", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(1));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains("FAIL std-dev-loading-nonnegative"));
    assert!(text.lines().last().unwrap().starts_with("counterexample [std-dev-loading-nonnegative]"));
}

#[test]
fn examples_tables() {
    let out = run(&["examples"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("rho,ts_actuarial,ts_financial,difference,var_change,invest\n"));
    assert!(text.contains("\n0.15,60,57.75,2.25\n"));
    assert!(text.ends_with('\n'));
}
