//! End-to-end runs of the command-line tool.

use std::path::PathBuf;
use std::process::{Command, Output};

use arrlab::configlib::from_json;

fn arrlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arrlab"))
        .args(args)
        .output()
        .expect("spawn arrlab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("arrlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn build_writes_a_loadable_configuration() {
    let path = scratch("c3.json");
    let o = arrlab(&["build", "--ceva", "3", "--dim", "2", "--out", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let cfg = from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(cfg.len(), 12);
    assert_eq!(cfg.ambient_dim(), 2);

    let o = arrlab(&["analyze", path.to_str().unwrap(), "--format", "json"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("\"splitting_type\":[4,7]"), "{out}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["unexpected_degrees"], serde_json::json!([5, 6]));
}

#[test]
fn builder_specs_are_accepted_as_input() {
    let o = arrlab(&["splitting", "ceva:5", "--format", "json"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("[6,11]"), "{}", stdout(&o));
    let o = arrlab(&["classify", "pg:3", "--dmax", "9"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains('|'));
}

#[test]
fn exc_table_lists_each_degree() {
    let o = arrlab(&["exc", "ceva:2", "--dmax", "5"]);
    assert!(o.status.success());
    let out = stdout(&o);
    for d in 1..=5 {
        assert!(
            out.lines()
                .any(|l| l.split('|').next().unwrap().trim() == d.to_string()),
            "{out}"
        );
    }
}

#[test]
fn malformed_input_exits_with_two() {
    let path = scratch("bad.json");
    std::fs::write(
        &path,
        "{\"field\": {\"kind\": \"rationals\"}, \"ambient_dim\": 2, \"points\": [[1, 0]]",
    )
    .unwrap();
    let o = arrlab(&["analyze", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));

    let o = arrlab(&["analyze", "ceva:3", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(2));
    let o = arrlab(&["analyze", "/nonexistent/file.json"]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn output_is_deterministic() {
    let a = arrlab(&["analyze", "generic:6:2:5", "--format", "json"]);
    let b = arrlab(&["analyze", "generic:6:2:5", "--format", "json"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let threads = Command::new(env!("CARGO_BIN_EXE_arrlab"))
        .args(["analyze", "generic:6:2:5", "--format", "json"])
        .env("ARRLAB_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, threads.stdout);
}

#[test]
fn free_and_bounds_subcommands() {
    let o = arrlab(&["free", "ceva:2", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["free"], serde_json::json!(true));
    let o = arrlab(&["bounds", "ceva:3", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["applicable"], serde_json::json!(true));
}
