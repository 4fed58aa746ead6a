use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_metric-embed"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report on stdout")
}

#[test]
fn validate_accepts_and_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.json", r#"{"dist": [[0, 1], [1, 0]]}"#);
    let out = run(&["validate", "--input", &good]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["validation"]["points"], 2);

    let bad = write(dir.path(), "bad.csv", "0,1,5\n1,0,1\n5,1,0\n");
    let out = run(&["validate", "--input", &bad]);
    assert_eq!(out.status.code(), Some(1));
    let msg = report(&out)["validation"]["error"].as_str().unwrap().to_string();
    assert!(msg.contains('0') && msg.contains('2') && msg.contains('1'), "{msg}");

    let garbled = write(dir.path(), "x.json", "{");
    assert_eq!(run(&["validate", "--input", &garbled]).status.code(), Some(2));
}

#[test]
fn embed_proper_report_shape() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "pair.json", r#"{"points": ["t0", "a"], "dist": [[0, 4], [4, 0]]}"#);
    let out = run(&["embed-proper", "--input", &input]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["schema"], "metric-embed.report/v1");
    assert_eq!(r["passed"], true);
    assert_eq!(r["summary"]["pairs"], 1);
    assert_eq!(r["constants"]["c_trunc_le_c"], true);
    assert!(r["config"].is_object() && r["provenance"].is_object());
}

#[test]
fn lp_and_coarse_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "cloud.json", r#"{"p": "inf", "points": [[0, 0], [0.3, 0.1], [2, 5], [-1, 4]]}"#);
    let out_path = dir.path().join("lp.json");
    let out = run(&["embed-lp", "--input", &input, "--lambda-sim", "2", "--theta", "random", "--seed", "3", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(r["summary"]["failed_pairs"], 0);

    let out = run(&["coarse", "--input", &input, "--epsilon", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["constants"]["c_a"].as_f64(), Some(4.5));
    assert_eq!(r["rounding"]["within_epsilon"], true);
}

#[test]
fn gen_then_net_and_moduli() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    let path = path.to_str().unwrap();
    let out = run(&["gen", "--kind", "random-graph-metric", "--n", "20", "--edge-prob", "0.3", "--seed", "5", "--out", path]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["net", "--input", path, "--radius", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["net"]["separated"], true);
    assert_eq!(r["net"]["maximal"], true);
    let out = run(&["moduli", "--input", path, "--thresholds", "0,1,2,100"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["moduli"]["rho"][3], "unbounded");
    assert_eq!(r["moduli"]["omega"][0].as_f64(), Some(0.0));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    let path = path.to_str().unwrap();
    run(&["gen", "--kind", "random-lp-cloud", "--n", "40", "--dim", "3", "--seed", "9", "--out", path]);
    let args = ["embed-proper", "--input", path, "--theta", "random", "--seed", "4"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn errors_exit_two() {
    assert_eq!(run(&["embed-lp", "--input", "/nonexistent/space.json"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.json", r#"{"dist": [[0, 1], [1, 0]]}"#);
    assert_eq!(run(&["embed-lp", "--input", &m]).status.code(), Some(2));
    assert_eq!(run(&["coarse", "--input", &m, "--epsilon", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["embed-lp", "--input", &m, "--lambda-sim", "0.5"]).status.code(), Some(2));
}
