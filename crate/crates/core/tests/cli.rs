use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pencil_core::fixtures::{example1, example2, exact_corpus, random_diagonal_polys};
use pencil_core::io::{parse_quadruple_str, write_quadruple, QuadrupleFile};
use pencil_core::linalg::{from_real, identity, zeros};
use pencil_core::pencil::{Pencil, SystemQuadruple};
use serde_json::Value;

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pencil-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn quadruple_file(name: &str, q: &SystemQuadruple) -> PathBuf {
    temp_file(name, &write_quadruple(q))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pencil")).args(args).env_remove("PENCIL_TOL").output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// `λ·A1 − A0` with no inputs and outputs.
fn state_only(a0: &[f64], a1: &[f64], d: usize) -> SystemQuadruple {
    SystemQuadruple::new(
        Pencil::new(from_real(d, d, a0), from_real(d, d, a1)).unwrap(),
        Pencil::zeros(d, 0),
        Pencil::zeros(0, d),
        Pencil::zeros(0, 0),
    )
    .unwrap()
}

fn constant_d() -> SystemQuadruple {
    SystemQuadruple::new(
        Pencil::zeros(0, 0),
        Pencil::zeros(0, 2),
        Pencil::zeros(2, 0),
        Pencil::constant(from_real(2, 2, &[1.0, 2.0, 3.0, 4.0])),
    )
    .unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn structure_of_constant_d_is_empty() {
    let f = quadruple_file("constant.json", &constant_d());
    let out = run(&["structure", path_str(&f)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = stdout_json(&out);
    assert_eq!(r["structure"]["finite"], Value::Array(vec![]));
    assert_eq!(r["structure"]["infinity"], serde_json::json!([0, 0]));
    assert_eq!(r["degree_sum"]["holds"], Value::Bool(true));
    assert_eq!(r["seed"], serde_json::json!(0));
}

#[test]
fn structure_report_is_deterministic() {
    let (e5, e1) = random_diagonal_polys(4);
    let f = quadruple_file("det.json", &example2(&e5, &e1));
    let a = run(&["structure", path_str(&f), "--seed", "3"]);
    let b = run(&["structure", path_str(&f), "--seed", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout_json(&a)["timing_ms"].is_null());
    let t = run(&["structure", path_str(&f), "--timing"]);
    assert!(stdout_json(&t)["timing_ms"].is_number());
}

#[test]
fn structure_of_the_diagonal_linearization() {
    let (e5, e1) = random_diagonal_polys(9);
    let f = quadruple_file("ex1.json", &example1(&e5, &e1));
    let out = run(&["structure", path_str(&f)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = stdout_json(&out);
    let zeros: i64 = r["structure"]["finite"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|p| p["indices"].as_array().unwrap().iter().map(|k| k.as_i64().unwrap().max(0)))
        .sum();
    assert_eq!(zeros, 6);
    assert!(r["structure"]["infinity"].as_array().unwrap().iter().all(|k| k.as_i64().unwrap() <= 0));
    let inf_deflated: u64 = r["reductions"].as_array().unwrap().iter().map(|s| s["infinite"].as_u64().unwrap()).sum();
    assert_eq!(inf_deflated, 4);
}

#[test]
fn text_format_and_report_file() {
    let (e5, e1) = random_diagonal_polys(2);
    let f = quadruple_file("text.json", &example2(&e5, &e1));
    let report = f.with_file_name("text-report.json");
    let out = run(&["structure", path_str(&f), "--format", "text", "--report", path_str(&report)]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("degree sum"));
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(saved["degree_sum"]["holds"], Value::Bool(true));
}

#[test]
fn absurd_tolerance_breaks_the_degree_sum() {
    let (_, eq) = exact_corpus(1, 7).pop().unwrap();
    let f = quadruple_file("corrupt.json", &eq.to_float().unwrap());
    assert_eq!(run(&["structure", path_str(&f)]).status.code(), Some(0));
    let out = run(&["structure", path_str(&f), "--tol", "1e-2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("degree-sum"), "{}", stderr(&out));
}

#[test]
fn tolerance_from_the_environment() {
    let f = quadruple_file("env.json", &constant_d());
    let out = Command::new(env!("CARGO_BIN_EXE_pencil"))
        .args(["structure", path_str(&f)])
        .env("PENCIL_TOL", "1e-9")
        .output()
        .unwrap();
    assert_eq!(stdout_json(&out)["tol"], serde_json::json!(1e-9));
}

#[test]
fn reduce_shrinks_the_state_dimension() {
    let (e5, e1) = random_diagonal_polys(6);
    for (q, shrink) in [(example1(&e5, &e1), 4), (example2(&e5, &e1), 5)] {
        let f = quadruple_file("reduce-in.json", &q);
        let out_path = f.with_file_name("reduce-out.json");
        let out = run(&["reduce", path_str(&f), "--output", path_str(&out_path)]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        let text = std::fs::read_to_string(&out_path).unwrap();
        let reduced = parse_quadruple_str(&text).unwrap();
        assert_eq!(reduced.order(), q.order() - shrink);
        let file: QuadrupleFile = serde_json::from_str(&text).unwrap();
        assert!(file.w_left.is_some() && file.w_right.is_some());
    }
}

#[test]
fn reduce_keeps_a_minimal_input() {
    let q = state_only(&[1.0, 0.0, 0.0, 2.0], &[1.0, 0.0, 0.0, 1.0], 2);
    let q = SystemQuadruple::new(
        q.a,
        Pencil::constant(identity(2)),
        Pencil::constant(identity(2)),
        Pencil::constant(zeros(2, 2)),
    )
    .unwrap();
    let f = quadruple_file("minimal.json", &q);
    let out = run(&["reduce", path_str(&f), "--order", "oc"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(parse_quadruple_str(std::str::from_utf8(&out.stdout).unwrap()).unwrap().order(), 2);
}

#[test]
fn scale_diagonal_example() {
    let f = quadruple_file("diag.json", &state_only(&[1.0, 0.0, 0.0, 100.0], &[0.0; 4], 2));
    let out = run(&["scale", path_str(&f)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = stdout_json(&out);
    assert!((r["scaling"]["gamma_left"].as_f64().unwrap() - 100.0).abs() < 1e-8);
    assert!((r["scaling"]["gamma_right"].as_f64().unwrap() - 100.0).abs() < 1e-8);
    let l0 = r["pencil"]["L0"].as_array().unwrap();
    assert!((l0[0][0].as_f64().unwrap() - 10.0).abs() < 1e-9);
    assert!((l0[3][0].as_f64().unwrap() - 10.0).abs() < 1e-9);
    assert!(stderr(&out).contains("row norms"));
}

#[test]
fn scale_balanced_input_is_near_identity() {
    let f = quadruple_file("balanced.json", &state_only(&[1.0, 0.0, 0.0, 1.0], &[0.0, 1.0, 1.0, 0.0], 2));
    for approach in ["1", "2"] {
        let out = run(&["scale", path_str(&f), "--approach", approach, "--pow2"]);
        assert_eq!(out.status.code(), Some(0));
        let r = stdout_json(&out);
        for side in ["d_left", "d_right"] {
            for v in r["scaling"][side].as_array().unwrap() {
                assert_eq!(v.as_f64().unwrap(), 1.0);
            }
        }
    }
}

#[test]
fn scale_divergence_exits_3() {
    let f = quadruple_file("tri.json", &state_only(&[1.0, 1.0, 0.0, 1.0], &[0.0; 4], 2));
    let out = run(&["scale", path_str(&f)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("approach 2"));
    assert_eq!(run(&["scale", path_str(&f), "--approach", "2"]).status.code(), Some(0));
}

#[test]
fn scale_accepts_a_pencil_file() {
    let f = temp_file("pencil.json", r#"{"schema":1,"rows":1,"cols":2,"L0":[[1,0],[0,0]],"L1":[[0,0],[4,0]]}"#);
    let out = run(&["scale", path_str(&f), "--normalize"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout_json(&out)["pencil"]["cols"], serde_json::json!(2));
}

#[test]
fn verify_passes_after_reduction() {
    let (e5, e1) = random_diagonal_polys(5);
    let f = quadruple_file("verify.json", &example2(&e5, &e1));
    let out = run(&["verify", path_str(&f), "--samples", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 5);
    assert!(!text.contains("FAIL"));
}

#[test]
fn verify_rejects_singular_a() {
    let f = quadruple_file("singular.json", &state_only(&[1.0, 0.0, 0.0, 0.0], &[0.0; 4], 2));
    let out = run(&["verify", path_str(&f)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("A not regular"));
}

#[test]
fn input_errors_exit_1() {
    let bad = temp_file("bad.json", "{\"schema\": 1,\n \"d\": oops}");
    let out = run(&["structure", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    let text = r#"{"schema":1,"d":0,"m":1,"n":1,"A0":[],"A1":[],"B0":[],"B1":[],"C0":[],"C1":[],"D0":[[1e999,0]],"D1":[[0,0]]}"#;
    let out = run(&["structure", path_str(&temp_file("inf.json", text))]);
    assert_eq!(out.status.code(), Some(1));

    assert_eq!(run(&["structure", "/nonexistent/file.json"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["scale", path_str(&bad), "--approach", "3"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
