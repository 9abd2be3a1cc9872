use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hypermatch"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn s(path: &Path) -> &str {
    path.to_str().unwrap()
}

const TRIANGLE: &str =
    r#"{"num_vertices":3,"edges":[{"vertices":[0,1]},{"vertices":[1,2]},{"vertices":[0,2]}]}"#;
const PATH3: &str = r#"{"num_vertices":3,"edges":[{"vertices":[0,1],"weight":"2"},{"vertices":[1,2],"weight":"1"}]}"#;

fn fano(dir: &TempDir) -> PathBuf {
    let path = dir.path().join("fano.json");
    let out = run(&["gen", "--family", "fano", "--out", s(&path)]);
    assert!(out.status.success());
    path
}

#[test]
fn solve_lp_on_fano_gives_seven_thirds() {
    let dir = TempDir::new().unwrap();
    let out = run(&["solve-lp", s(&fano(&dir))]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["value"], "7/3");
    assert_eq!(report["verdicts"]["sparsity"], "pass");
    for x in report["x"].as_array().unwrap() {
        assert_eq!(x, "1/3");
    }
}

#[test]
fn malformed_instance_exits_two() {
    let dir = TempDir::new().unwrap();
    for text in [
        "{not json",
        r#"{"num_vertices":2,"edges":[{"vertices":[0,5]}]}"#,
        r#"{"num_vertices":2,"edges":[{"vertices":[0,1],"weight":"1/0"}]}"#,
        r#"{"num_vertices":2,"edges":[{"vertices":[0,1],"weight":"-1"}]}"#,
    ] {
        let path = write(&dir, "bad.json", text);
        let out = run(&["solve-lp", s(&path)]);
        assert_eq!(out.status.code(), Some(2), "{text}");
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(
        run(&["solve-lp", "/nonexistent/file.json"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn triangle_sample_csv() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "tri.json", TRIANGLE);
    let x = write(&dir, "x.json", r#"{"x":["1/2","1/2","1/2"]}"#);
    let out = run(&[
        "sample",
        s(&inst),
        "--x",
        s(&x),
        "--samples",
        "50000",
        "--seed",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "edge_index,edge_size,x,analytic_marginal,lower_bound,frequency,std_error"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    for row in rows {
        assert_eq!(row[3], "1/3");
        assert_eq!(row[4], "1/3");
        let freq: f64 = row[5].parse().unwrap();
        let se: f64 = row[6].parse().unwrap();
        assert!((freq - 1.0 / 3.0).abs() <= 4.0 * se.max(1e-3), "{freq}");
    }
}

#[test]
fn sample_float_adds_columns() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "tri.json", TRIANGLE);
    let out = run(&["sample", s(&inst), "--samples", "100", "--float"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().next().unwrap().ends_with("lower_bound_approx"));
}

#[test]
fn zero_samples_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "tri.json", TRIANGLE);
    assert_eq!(
        run(&["sample", s(&inst), "--samples", "0"]).status.code(),
        Some(2)
    );
}

#[test]
fn infeasible_point_is_refused() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "tri.json", TRIANGLE);
    let x = write(&dir, "x.json", r#"{"x":["1","1","0"]}"#);
    for cmd in ["sample", "greedy", "distribution"] {
        let out = run(&[cmd, s(&inst), "--x", s(&x)]);
        assert_eq!(out.status.code(), Some(2), "{cmd}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(err.contains("x(delta(1)) = 2 > b(1) = 1"), "{err}");
    }
}

#[test]
fn sample_refuses_non_unit_capacities() {
    let dir = TempDir::new().unwrap();
    let inst = write(
        &dir,
        "b.json",
        r#"{"num_vertices":2,"edges":[{"vertices":[0,1]}],"capacities":[2,2]}"#,
    );
    let out = run(&["sample", s(&inst)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn greedy_on_fano_is_tight() {
    let dir = TempDir::new().unwrap();
    let out = run(&["greedy", s(&fano(&dir))]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["bound_slack"], "0");
    assert_eq!(report["matching"].as_array().unwrap().len(), 1);
    for key in ["greedy_bound", "domination", "vertex_load", "total_charge"] {
        assert_eq!(report["verdicts"][key], "pass");
    }
}

#[test]
fn greedy_on_weighted_path() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "path.json", PATH3);
    let x = write(&dir, "x.json", r#"{"x":["1/2","1/2"]}"#);
    let report = json(&run(&["greedy", s(&inst), "--x", s(&x)]));
    assert_eq!(report["matching"], serde_json::json!([0]));
    assert_eq!(report["matching_weight"], "2");
}

#[test]
fn distribution_on_triangle() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "tri.json", TRIANGLE);
    let x = write(&dir, "x.json", r#"{"x":["1/2","1/2","1/2"]}"#);
    let dist = dir.path().join("dist.json");
    let out = run(&["distribution", s(&inst), "--x", s(&x), "--out", s(&dist)]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["verdicts"]["distribution"], "pass");
    let file: Value = serde_json::from_str(&fs::read_to_string(&dist).unwrap()).unwrap();
    let atoms = file["atoms"].as_array().unwrap();
    assert!(atoms.len() <= 4);
    assert_eq!(file["p"], serde_json::json!(["1/3", "1/3", "1/3"]));
}

#[test]
fn distribution_embedded_without_out() {
    let dir = TempDir::new().unwrap();
    let report = json(&run(&["distribution", s(&fano(&dir))]));
    assert!(report["distribution"]["atoms"].as_array().unwrap().len() <= 8);
}

#[test]
fn gen_projective_plane_three() {
    let out = run(&["gen", "--family", "pg", "--q", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let inst = json(&out);
    assert_eq!(inst["num_vertices"], 13);
    let edges = inst["edges"].as_array().unwrap();
    assert_eq!(edges.len(), 13);
    assert!(edges
        .iter()
        .all(|e| e["vertices"].as_array().unwrap().len() == 4));
    assert_eq!(
        run(&["gen", "--family", "pg", "--q", "4"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["gen", "--family", "pg"]).status.code(), Some(2));
}

#[test]
fn gen_random_is_deterministic_and_round_trips() {
    let dir = TempDir::new().unwrap();
    let args = [
        "gen",
        "--family",
        "random",
        "--n",
        "8",
        "--m",
        "10",
        "--sizes",
        "2:4",
        "--weights",
        "1:9",
        "--bmax",
        "2",
        "--seed",
        "11",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let path = write(&dir, "r.json", std::str::from_utf8(&a.stdout).unwrap());
    let out = run(&["verify-all", s(&path), "--samples", "1000"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["verdicts"]["distribution"], "pass");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let path = fano(&dir);
    let args = [
        "verify-all",
        s(&path),
        "--samples",
        "5000",
        "--seed",
        "3",
        "--float",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = run(&[
        "verify-all",
        s(&path),
        "--samples",
        "5000",
        "--seed",
        "4",
        "--float",
    ]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn verify_all_marks_sampling_not_run_for_b_matching() {
    let dir = TempDir::new().unwrap();
    let inst = write(
        &dir,
        "b.json",
        r#"{"num_vertices":3,"edges":[{"vertices":[0,1]},{"vertices":[1,2]}],"capacities":[1,2,1]}"#,
    );
    let report = json(&run(&["verify-all", s(&inst)]));
    assert_eq!(report["verdicts"]["monte_carlo"], "not-run");
    assert_eq!(report["verdicts"]["greedy_bound"], "pass");
}

#[test]
fn csv_report_lists_verdicts() {
    let dir = TempDir::new().unwrap();
    let out = run(&["solve-lp", s(&fano(&dir)), "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("edge,size,weight,x,g,p\n"));
    assert!(text.contains("# sparsity: pass"));
}
