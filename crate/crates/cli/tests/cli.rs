use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn wbl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wbl"))
        .args(args)
        .env_remove("WBL_OUT_DIR")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

#[test]
fn solve_triangles() {
    let o = wbl(&[
        "solve", "--n", "3", "--b", "0", "--first", "W", "--target", "C3", "--pv",
    ]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("winner: Walker"), "{s}");
    assert_eq!(s.lines().filter(|l| l.starts_with("W ")).count(), 3);
    let o = wbl(&[
        "solve", "--n", "3", "--b", "1", "--first", "W", "--target", "C3",
    ]);
    assert!(stdout(&o).contains("winner: Breaker"));
}

#[test]
fn solve_longest_matches_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pv.txt");
    let o = wbl(&[
        "solve",
        "--n",
        "5",
        "--b",
        "1",
        "--first",
        "B",
        "--fixture",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("value: 3"));
    let frozen = std::fs::read_to_string(fixture("solve_n5_b1_B.txt")).unwrap();
    assert_eq!(std::fs::read_to_string(out).unwrap(), frozen);
}

#[test]
fn solve_rejects_bad_input() {
    assert_eq!(
        wbl(&["solve", "--n", "7", "--b", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        wbl(&["solve", "--n", "4", "--b", "1", "--target", "C"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn replay_fixture_and_tampered_copy() {
    let o = wbl(&["replay", fixture("solve_n4_b1_W.txt").to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("\"n\":4"));
    let text = std::fs::read_to_string(fixture("solve_n4_b1_W.txt")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, text.replacen("B ", "B  ", 1)).unwrap();
    let o = wbl(&["replay", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
}

#[test]
fn run_writes_outputs_and_reports_failures() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(
        &spec,
        r#"{"name": "cli", "kind": "match", "n": 25, "b": 1, "walker": "random", "breaker": "isolate1",
            "trials": 4, "assertions": ["replay"]}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = wbl(&[
        "run",
        spec.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
    let csv = std::fs::read_to_string(out.join("cli.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2 + 4);
    assert!(out.join("cli.json").exists());

    let env_dir = dir.path().join("env");
    let o = Command::new(env!("CARGO_BIN_EXE_wbl"))
        .args(["run", spec.to_str().unwrap(), "--trials", "2"])
        .env("WBL_OUT_DIR", &env_dir)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(
        std::fs::read_to_string(env_dir.join("cli.csv"))
            .unwrap()
            .lines()
            .count(),
        4
    );

    // isolate1 keeps one vertex off every Walker cycle.
    let o = wbl(&[
        "run",
        spec.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--walker",
        "greedy-path",
    ]);
    assert!(o.status.success());
    std::fs::write(
        &spec,
        r#"{"name": "cli", "kind": "match", "n": 25, "b": 1, "walker": "greedy-path", "breaker": "isolate1",
            "trials": 2, "assertions": [{"cycle_at_least": 25}]}"#,
    )
    .unwrap();
    let o = wbl(&[
        "run",
        spec.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("seed 1"));

    std::fs::write(&spec, "{\"name\": 3}").unwrap();
    assert_eq!(wbl(&["run", spec.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn minbox_fuzz_small() {
    let o = wbl(&[
        "minbox-fuzz",
        "--n",
        "100",
        "--b",
        "1,10",
        "--schedules",
        "16",
        "--rounds",
        "50",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("violations: 0"));
}
