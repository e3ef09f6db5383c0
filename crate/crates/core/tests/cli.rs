use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lpsens::io::report::ReportDocument;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn lpsens(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpsens")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_temp(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn report(args: &[&str]) -> ReportDocument {
    let o = lpsens(args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    ReportDocument::from_json(&stdout(&o)).unwrap()
}

#[test]
fn analyze_json_report() {
    let file = data("example1_c15.json");
    let r = report(&["analyze", file.to_str().unwrap(), "--format", "json"]);
    assert!((r.d_w - 29.5556).abs() < 1e-3);
    assert!((r.d_r - 1.14936).abs() < 1e-4);
    assert_eq!(r.grade.to_string(), "exact");
}

#[test]
fn rational_backend_reports_exact_values() {
    let file = data("example1_c2.json");
    let r = report(&["analyze", file.to_str().unwrap(), "--backend", "rational", "--method", "basis", "--format", "json"]);
    assert_eq!(r.d_w_exact.as_deref(), Some("479"));
    assert_eq!(r.per_basis.len(), 2);
}

#[test]
fn pattern_options() {
    let file = data("hypercube3.json");
    let file = file.to_str().unwrap();
    let r = report(&["analyze", file, "--pattern", "absolute", "--format", "json"]);
    assert!((r.d_w - 15.0).abs() < 1e-9);
    // x_1 = 1 at the optimum
    let r = report(&["analyze", file, "--pattern", "obj:1", "--format", "json"]);
    assert!((r.d_w - 1.0).abs() < 1e-9);

    let dir = tempfile::tempdir().unwrap();
    let pattern = write_temp(
        &dir,
        "p.json",
        r#"{"dA": [[0,0,0],[0,0,0],[0,0,0],[0,0,0],[0,0,0],[0,0,0]], "db": [1,0,0,0,0,0], "dc": [0,0,0]}"#,
    );
    let r = report(&["analyze", file, "--pattern", &format!("json:{pattern}"), "--format", "json"]);
    assert!((r.d_w - 1.0).abs() < 1e-9);
}

#[test]
fn range_at_zero_is_the_optimum() {
    let file = data("example1_c2.json");
    let o = lpsens(&["range", file.to_str().unwrap(), "--alpha", "0", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["f_low"].as_f64(), Some(1.0));
    assert_eq!(v["f_high"].as_f64(), Some(1.0));
}

#[test]
fn infeasible_and_unbounded_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let infeasible = write_temp(
        &dir,
        "inf.json",
        r#"{"A": [[1, 1]], "b": [-1], "c": [1, 1], "form": "standard"}"#,
    );
    let unbounded = write_temp(
        &dir,
        "unb.json",
        r#"{"A": [[1, -1]], "b": [0], "c": [-1, 0], "form": "standard"}"#,
    );
    for file in [&infeasible, &unbounded] {
        for cmd in ["solve", "analyze"] {
            let o = lpsens(&[cmd, file]);
            assert_eq!(o.status.code(), Some(2), "{cmd} {file}");
        }
    }
}

#[test]
fn errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_temp(&dir, "bad.json", r#"{"A": [[1, 2]], "b": [1, 2], "c": [1, 1]}"#);
    assert_eq!(lpsens(&["analyze", &bad]).status.code(), Some(1));
    assert_eq!(lpsens(&["analyze", "/nonexistent.json"]).status.code(), Some(1));
    assert_eq!(lpsens(&["frobnicate"]).status.code(), Some(1));
    let file = data("example1_c15.json");
    let o = lpsens(&["analyze", file.to_str().unwrap(), "--pattern", "entry:9,9"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn seed_perturb_is_deterministic() {
    let file = data("example1_c15.json");
    let file = file.to_str().unwrap();
    let run = |seed: &str, threads: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_lpsens"))
            .args(["analyze", file, "--seed-perturb", "0.01", "--seed", seed, "--format", "json"])
            .env("LPSENS_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        let mut r = ReportDocument::from_json(&stdout(&o)).unwrap();
        r.seconds = 0.0;
        r
    };
    let a = run("7", "1");
    assert_eq!(a, run("7", "4"));
    assert_ne!(a.d_w, run("8", "1").d_w);
}

#[test]
fn mps_input() {
    let file = data("smoke/afiro.mps");
    let o = lpsens(&["solve", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("-464.75"));
}
