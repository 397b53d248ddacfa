use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sphconv")).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn generated_body_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let first = p(dir.path(), "a.json");
    let second = p(dir.path(), "b.json");
    assert_eq!(code(&["gen", "random", "--seed", "4", "--out", &first]), 0);
    assert_eq!(code(&["export", &first, "--format", "json", "--out", &second]), 0);
    assert_eq!(std::fs::read_to_string(&first).unwrap(), std::fs::read_to_string(&second).unwrap());
}

#[test]
fn analyze_reports_orthant_widths() {
    let dir = tempfile::tempdir().unwrap();
    let f = p(dir.path(), "o.json");
    assert_eq!(code(&["gen", "orthant", "--out", &f]), 0);
    let out = run(&["analyze", &f]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let text = v.to_string();
    assert!(text.contains("diameter") && text.contains("thickness"), "{text}");
}

#[test]
fn polar_check_on_cap() {
    let dir = tempfile::tempdir().unwrap();
    let f = p(dir.path(), "c.json");
    assert_eq!(code(&["gen", "cap", "--center", "0,0,1", "--radius", "0.4", "--out", &f]), 0);
    let out = run(&["polar", &f, "--check"]);
    assert!(out.status.success());
    assert!(!out.stderr.is_empty());
}

#[test]
fn usage_and_geometry_errors_have_distinct_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = p(dir.path(), "bad.json");
    std::fs::write(&bad, "{\"kind\": \"polytope\"").unwrap();
    assert_eq!(code(&["analyze", &bad]), 2);
    assert_eq!(code(&["gen", "reuleaux", "--tau", "4.0"]), 2);
    assert_eq!(code(&["verify", "nonsense"]), 2);
    let flat = p(dir.path(), "flat.json");
    std::fs::write(
        &flat,
        r#"{"kind":"polytope","dim":3,"vertices":[[1,0,0],[0,1,0],[0.7071067811865476,0.7071067811865476,0]]}"#,
    )
    .unwrap();
    assert_eq!(code(&["analyze", &flat]), 3);
}

#[test]
fn wulff_cube_is_not_self_dual() {
    let dir = tempfile::tempdir().unwrap();
    let g = p(dir.path(), "cube.json");
    assert_eq!(code(&["gen", "gamma", "--kind", "cube", "--out", &g]), 0);
    assert_eq!(code(&["wulff", "build", &g]), 0);
    assert_eq!(code(&["wulff", "selfdual", &g]), 1);
}
