use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ptsym::construction::{make_p0, PtSystem};
use ptsym::io::write_json;
use ptsym::linalg::{ComplexMatrix, C64};
use ptsym::oracle::{h2, p2, TwoByTwoParams};
use serde_json::Value;
use tempfile::TempDir;

fn ptsym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptsym")).args(args).output().expect("run ptsym")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/asymmetric_2x2.json")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_system(dir: &TempDir, name: &str, sys: &PtSystem) -> PathBuf {
    let path = dir.path().join(name);
    write_json(&path, sys).unwrap();
    path
}

fn analyze(path: &Path) -> Value {
    let out = ptsym(&["analyze", "--input", path_str(path)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn generate_two_level_system() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("sys.json");
    let out = ptsym(&["generate", "--dim", "2", "--signature", "1,1", "--seed", "7", "--out", path_str(&path)]);
    assert!(out.status.success());
    let sys: PtSystem = ptsym::io::read_json(&path).unwrap();
    assert!(sys.h().is_symmetric(0.0));
    assert!(sys.p().mul(sys.p()).unwrap().distance_from_identity() < 1e-14);
    assert_eq!(sys.seed(), Some(7));
}

#[test]
fn generate_prints_parity_count() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("sys.json");
    let out = ptsym(&["generate", "--dim", "8", "--signature", "6,2", "--seed", "1", "--out", path_str(&path)]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().any(|l| l == "parity params: 12"), "{text}");
    assert!(text.contains("parity_max=16 h0=36 pt=52 hermitian=64 real_symmetric=36"), "{text}");
}

#[test]
fn generate_without_minus_block_is_real() {
    let out = ptsym(&["generate", "--dim", "3", "--signature", "3,0", "--seed", "2"]);
    assert!(out.status.success());
    let sys: PtSystem = serde_json::from_slice(&out.stdout).unwrap();
    assert!(sys.h().is_real(0.0));
}

#[test]
fn generate_rejects_bad_signature() {
    assert_eq!(ptsym(&["generate", "--dim", "3", "--signature", "2,2"]).status.code(), Some(1));
    assert_eq!(ptsym(&["generate", "--signature", "x"]).status.code(), Some(1));
    assert_eq!(ptsym(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let out =
            ptsym(&["generate", "--dim", "5", "--seed", "99", "--coupling", "0.3", "--unbroken", "--out", path_str(p)]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let first = ptsym(&["analyze", "--input", path_str(&a)]).stdout;
    let second = ptsym(&["analyze", "--input", path_str(&b)]).stdout;
    assert_eq!(first, second);
    let e1 = ptsym(&["evolve", "--input", path_str(&a), "--state", "random:3"]).stdout;
    let e2 = ptsym(&["evolve", "--input", path_str(&a), "--state", "random:3"]).stdout;
    assert_eq!(e1, e2);
}

#[test]
fn analyze_round_trips_h_exactly() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("sys.json");
    assert!(ptsym(&["generate", "--dim", "4", "--seed", "11", "--out", path_str(&path)]).status.success());
    let sys: PtSystem = ptsym::io::read_json(&path).unwrap();
    let report = analyze(&path);
    let h: ComplexMatrix = serde_json::from_value(report["h"].clone()).unwrap();
    assert_eq!(&h, sys.h());
    let input: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(input["h"], report["h"]);
}

#[test]
fn analyze_unbroken_two_level() {
    let dir = TempDir::new().unwrap();
    let pr = TwoByTwoParams { r: 0.2, s: 0.5, t: 1.0, phi: 0.7 };
    let path = write_system(&dir, "u.json", &PtSystem::new(h2(&pr), p2(pr.phi)).unwrap());
    let report = analyze(&path);
    assert_eq!(report["phase"], "unbroken");
    // Eigenvalues ascend, so ε₋ (norm −1) comes first when t > 0.
    assert_eq!(report["signs"], serde_json::json!([-1, 1]));
    assert!(report["c_operator"].is_object());
    assert!(report["invariants"]["c_squared"].as_f64().unwrap() < 1e-12);
}

#[test]
fn analyze_broken_two_level() {
    let dir = TempDir::new().unwrap();
    let pr = TwoByTwoParams { r: 0.0, s: 1.5, t: 1.0, phi: 0.0 };
    let path = write_system(&dir, "b.json", &PtSystem::new(h2(&pr), p2(0.0)).unwrap());
    let report = analyze(&path);
    assert_eq!(report["phase"], "broken");
    assert_eq!(report["conjugate_pairs"], 1);
    assert!(report["c_operator"].is_null());
}

#[test]
fn analyze_real_symmetric_overlap() {
    let dir = TempDir::new().unwrap();
    let h = ComplexMatrix::from_real_rows(&[vec![1.0, 0.3, 0.0], vec![0.3, -0.5, 2.0], vec![0.0, 2.0, 0.1]]).unwrap();
    let path = write_system(&dir, "r.json", &PtSystem::new(h, ComplexMatrix::identity(3)).unwrap());
    let classes = analyze(&path)["classes"].clone();
    for class in ["hermitian", "pt_symmetric", "real_symmetric", "symmetric"] {
        assert!(classes.as_array().unwrap().iter().any(|c| c == class), "{classes}");
    }
}

#[test]
fn analyze_rejects_malformed_input() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"h\": 3}").unwrap();
    assert_eq!(ptsym(&["analyze", "--input", path_str(&path)]).status.code(), Some(1));
    assert_eq!(ptsym(&["analyze", "--input", path_str(&fixture())]).status.code(), Some(1));
}

#[test]
fn counts_table_and_csv() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("counts.csv");
    let out = ptsym(&["counts", "--max-dim", "6", "--out", path_str(&path)]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&path).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "D,parity,h0,pt,hermitian,real_symmetric");
    assert_eq!(rows[1], "1,0,1,1,1,1");
    assert_eq!(rows[4], "4,4,10,14,16,10");
    assert_eq!(rows[5], "5,6,15,21,25,15");
    assert_eq!(rows.len(), 7);
    assert!(stdout(&out).starts_with("D "));
    assert_eq!(ptsym(&["counts", "--max-dim", "0"]).status.code(), Some(1));
}

fn sweep_rows(args: &[&str]) -> Vec<Vec<String>> {
    let out = ptsym(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    stdout(&out).lines().map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn sweep_s_crosses_the_boundary_at_one() {
    let rows = sweep_rows(&["sweep", "--param", "s", "--range", "0,2.05,0.1", "--t", "1"]);
    assert_eq!(rows[0], ["value", "re_0", "im_0", "re_1", "im_1", "phase", "min_gap"]);
    for row in &rows[1..] {
        let s: f64 = row[0].parse().unwrap();
        let expect = if (s - 1.0).abs() < 1e-12 {
            "exceptional"
        } else if s < 1.0 {
            "unbroken"
        } else {
            "broken"
        };
        assert_eq!(row[5], expect, "s = {s}");
    }
}

#[test]
fn sweep_phi_leaves_spectrum_unchanged() {
    let rows =
        sweep_rows(&["sweep", "--param", "phi", "--range", "0,6.283185307179586,0.2", "--r", "0.3", "--s", "0.4"]);
    let first: Vec<f64> = rows[1][1..5].iter().map(|x| x.parse().unwrap()).collect();
    for row in &rows[2..] {
        for (k, x) in row[1..5].iter().enumerate() {
            assert!((x.parse::<f64>().unwrap() - first[k]).abs() < 1e-12);
        }
    }
}

#[test]
fn sweep_edge_cases() {
    let rows = sweep_rows(&["sweep", "--param", "s", "--range", "1,1,0.1"]);
    assert_eq!(rows.len(), 1);
    assert_eq!(ptsym(&["sweep", "--param", "s", "--range", "0,1,0"]).status.code(), Some(1));
    assert_eq!(ptsym(&["sweep", "--param", "q", "--range", "0,1,0.1"]).status.code(), Some(1));
}

#[test]
fn sweep_block_entry_of_generated_system() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("sys.json");
    assert!(ptsym(&["generate", "--dim", "2", "--seed", "5", "--out", path_str(&path)]).status.success());
    let rows = sweep_rows(&["sweep", "--input", path_str(&path), "--param", "B[0,0]", "--range", "0,1,0.25"]);
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0].len(), 1 + 4 + 2);
    // B = 0 decouples the blocks: H is similar to a real symmetric matrix.
    assert_eq!(rows[1][5], "unbroken");
    assert_eq!(
        ptsym(&["sweep", "--input", path_str(&path), "--param", "B[5,0]", "--range", "0,1,0.5"]).status.code(),
        Some(1)
    );
}

fn trace_columns(text: &str) -> Vec<(f64, f64)> {
    text.lines()
        .skip(1)
        .map(|l| {
            let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (f[1], f[2])
        })
        .collect()
}

#[test]
fn evolve_unbroken_system() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("sys.json");
    assert!(ptsym(&[
        "generate",
        "--dim",
        "4",
        "--seed",
        "3",
        "--coupling",
        "0.3",
        "--unbroken",
        "--out",
        path_str(&path)
    ])
    .status
    .success());

    assert_eq!(ptsym(&["evolve", "--input", path_str(&path), "--steps", "1"]).status.code(), Some(1));
    assert_eq!(ptsym(&["evolve", "--input", path_str(&path), "--state", "eigen:9"]).status.code(), Some(1));

    let out = ptsym(&["evolve", "--input", path_str(&path), "--state", "eigen:1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("t,re_inner,im_inner\n"));
    let cols = trace_columns(&text);
    assert_eq!(cols.len(), 101);
    assert!(cols.iter().all(|&(re, im)| (re - cols[0].0).abs() < 1e-12 && (im - cols[0].1).abs() < 1e-12));

    let csv = dir.path().join("trace.csv");
    let out = ptsym(&[
        "evolve",
        "--input",
        path_str(&path),
        "--state",
        "random:1",
        "--state-b",
        "random:2",
        "--out",
        path_str(&csv),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let cols = trace_columns(&std::fs::read_to_string(&csv).unwrap());
    let drift =
        cols.iter().map(|&(re, im)| (C64::new(re, im) - C64::new(cols[0].0, cols[0].1)).norm()).fold(0.0, f64::max);
    assert!(drift <= 1e-8);
}

#[test]
fn evolve_asymmetric_fixture_flags_violation() {
    let out = ptsym(&["evolve", "--input", path_str(&fixture())]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("max drift"));
}

#[test]
fn evolve_broken_system_fails_numerically() {
    let dir = TempDir::new().unwrap();
    let pr = TwoByTwoParams { r: 0.0, s: 2.0, t: 1.0, phi: 0.0 };
    let path = write_system(&dir, "b.json", &PtSystem::new(h2(&pr), make_p0(1, 1).unwrap()).unwrap());
    assert_eq!(ptsym(&["evolve", "--input", path_str(&path)]).status.code(), Some(2));
}
