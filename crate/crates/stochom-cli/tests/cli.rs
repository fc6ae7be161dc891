//! End-to-end tests of the binary: flags, outputs and exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stochom"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_two_point(dir: &Path) -> String {
    let path = dir.join("two_point.txt");
    std::fs::write(&path, "v 1 1/2\nv 2 1/4\ne 1 2 1/3\n").unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn expect_exact_and_euler() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_two_point(dir.path());
    let out = run(&["expect", &file, "--dim", "0", "--mode", "exact"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("17/24"));
    let out = run(&["expect", &file, "--mode", "euler"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("17/24"));
}

#[test]
fn expect_mc_deterministic_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_two_point(dir.path());
    let args = ["expect", &file, "--mode", "mc", "--samples", "20000", "--seed", "7"];
    let first = run(&args);
    assert!(first.status.success());
    let again = run(&args);
    assert_eq!(stdout(&first), stdout(&again));
    let single = bin().args(args).arg("--threads").arg("1").output().unwrap();
    assert_eq!(stdout(&first), stdout(&single));
    let double = bin().args(args).arg("--threads").arg("2").output().unwrap();
    assert_eq!(stdout(&first), stdout(&double));
}

#[test]
fn expect_input_errors_exit_2() {
    let out = run(&["expect", "/nonexistent/complex.txt"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("/nonexistent/complex.txt"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "e 1 2 1/3\n").unwrap(); // endpoints missing
    let out = run(&["expect", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("missing faces"));
}

#[test]
fn expect_guard_exit_3_suggests_mc() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("big.txt");
    // complete graph over 8 points: 36 cells, above the enumeration guard
    let mut text = String::new();
    for i in 1..=8 {
        text.push_str(&format!("v {i} 1/2\n"));
        for j in (i + 1)..=8 {
            text.push_str(&format!("e {i} {j} 1/2\n"));
        }
    }
    std::fs::write(&path, text).unwrap();
    let out = run(&["expect", path.to_str().unwrap(), "--mode", "exact"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("Monte Carlo"));
}

#[test]
fn coeff_methods_and_cache() {
    let dir = tempfile::tempdir().unwrap();
    let pattern = dir.path().join("k4.txt");
    std::fs::write(
        &pattern,
        "e 1 2\ne 1 3\ne 1 4\ne 2 3\ne 2 4\ne 3 4\n",
    )
    .unwrap();
    let cache = dir.path().join("coeffs.cache");
    let file = pattern.to_str().unwrap();
    let cache_arg = cache.to_str().unwrap();
    let out = run(&["coeff", file, "--method", "direct", "--no-cache"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "2");
    let out = run(&["coeff", file, "--method", "recursive", "--cache", cache_arg]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "2");
    assert!(cache.metadata().unwrap().len() > 0);
    // second run answers from the persisted cache
    let out = run(&["coeff", file, "--cache", cache_arg, "--verify"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "2");
}

#[test]
fn poly_output_and_guard() {
    let out = run(&["poly", "--points", "4", "--dim", "1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "2x^6 - 6x^5 + 3x^4 + 4x^3");
    let out = run(&["poly", "--points", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "0");
    let out = run(&["poly", "--points", "9"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn vr_pipeline_feeds_expect() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("square.csv");
    std::fs::write(&csv, "0,0\n1,0\n1,1\n0,1\n").unwrap();
    let complex_file = dir.path().join("square_complex.txt");
    let out = run(&[
        "vr",
        csv.to_str().unwrap(),
        "--radius",
        "1.05",
        "--max-dim",
        "1",
        "--out",
        complex_file.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&complex_file).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("e ")).count(), 4);
    let out = run(&["expect", complex_file.to_str().unwrap(), "--dim", "1"]);
    assert!(out.status.success(), "{}", stderr(&out));

    // radius 0: vertices only, all certain
    let out = run(&["vr", csv.to_str().unwrap(), "--radius", "0"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "v 1 1\nv 2 1\nv 3 1\nv 4 1\n");

    let out = run(&["vr", "/nonexistent/points.csv", "--radius", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_suite_passes() {
    let out = run(&["verify", "--trials", "40", "--max-cells", "8", "--seed", "3"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("verify pass"));
    // seeded determinism of the report
    let again = run(&["verify", "--trials", "40", "--max-cells", "8", "--seed", "3"]);
    assert_eq!(stdout(&out), stdout(&again));
}
