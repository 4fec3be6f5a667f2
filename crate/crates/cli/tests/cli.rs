use std::path::Path;
use std::process::{Command, Output};

fn elasto(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_elasto"))
        .args(args)
        .env("ELASTO_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

#[test]
fn validate_exit_codes() {
    let ok = elasto(&["validate", "--config", &fixture("ridge.conf")]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("result: PASS"));

    let bad = elasto(&["validate", "--config", &fixture("rotational.conf")]);
    assert_eq!(bad.status.code(), Some(2));

    let broken = elasto(&["validate", "--config", &fixture("malformed.conf")]);
    assert_eq!(broken.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&broken.stderr).contains("line 4"));
}

#[test]
fn missing_config_and_bad_usage_are_errors() {
    assert_eq!(elasto(&["validate", "--config", "/nonexistent/x.conf"]).status.code(), Some(1));
    assert_eq!(elasto(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(elasto(&["--help"]).status.code(), Some(0));
}

#[test]
fn solve_writes_vtk_with_stress() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("slice.vtk");
    let run = elasto(&[
        "solve",
        "--config",
        &fixture("ridge.conf"),
        "--stress",
        "--format",
        "vtk",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# vtk DataFile Version 3.0\n"));
    assert!(text.contains("DIMENSIONS 5 4 1\n"));
    assert!(text.contains("TENSORS stress double\n"));
}

#[test]
fn solve_refuses_non_admissible_data() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("rot.conf");
    let text = std::fs::read_to_string(fixture("rotational.conf")).unwrap() + "[output]\npoint = 0.5, 0, 0, 0\n";
    std::fs::write(&cfg, text).unwrap();
    let cfg = cfg.to_str().unwrap();
    assert_eq!(elasto(&["solve", "--config", cfg]).status.code(), Some(2));
    let forced = elasto(&["solve", "--config", cfg, "--force"]);
    assert_eq!(forced.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&forced.stdout).starts_with("t,x1,x2,x3,u1,u2,u3\n"));
}

#[test]
fn invalid_thread_count_is_an_error() {
    let run = Command::new(env!("CARGO_BIN_EXE_elasto"))
        .args(["validate", "--config", &fixture("ridge.conf")])
        .env("ELASTO_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("ELASTO_THREADS"));
}
