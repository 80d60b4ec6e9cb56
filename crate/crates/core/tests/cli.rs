//! End-to-end runs of the `anisolog` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_anisolog"))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

const DISLOCATION: &str = r#"{"anisotropy": {"preset": "dislocation", "alpha": 0.5}}"#;

#[test]
fn analyze_labels_profiles() {
    let dir = TempDir::new().unwrap();
    let cases = [
        (r#"{"anisotropy": {"preset": "coulomb"}}"#, "strictly-positive"),
        (DISLOCATION, "strictly-positive"),
        (r#"{"anisotropy": {"preset": "dislocation", "alpha": 1.0}}"#, "degenerate"),
        (r#"{"anisotropy": {"cos": [0.8], "sin": [0.0]}}"#, "indefinite"),
    ];
    for (i, (cfg, label)) in cases.iter().enumerate() {
        let path = write(&dir, &format!("c{i}.json"), cfg);
        let out = run(&["analyze", p(&path)]);
        assert_eq!(out.status.code(), Some(0), "{cfg}");
        assert_eq!(json(&out)["label"], *label, "{cfg}");
    }
}

#[test]
fn solve_reports_ellipse_and_el_residuals() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", DISLOCATION);
    let out = run(&["solve", p(&cfg)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["prediction"]["kind"], "ellipse");
    let a1 = v["prediction"]["a1"].as_f64().unwrap();
    let a2 = v["prediction"]["a2"].as_f64().unwrap();
    assert!((a1 - 0.5f64.sqrt()).abs() < 1e-8);
    assert!((a2 - 1.5f64.sqrt()).abs() < 1e-8);
    assert!(v["el_report"]["interior_max_grad_residual"].as_f64().unwrap() < 1e-6);
    assert!(v["el_report"]["exterior_min_radial_residual"].as_f64().unwrap() >= -1e-6);
}

#[test]
fn solve_degenerate_gives_segment() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", r#"{"anisotropy": {"preset": "dislocation", "alpha": 1.0}}"#);
    let out = run(&["solve", p(&cfg)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["prediction"]["kind"], "segment");
    let d = v["prediction"]["direction"].as_f64().unwrap();
    assert!((d - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
}

#[test]
fn solve_refuses_indefinite_profile() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", r#"{"anisotropy": {"cos": [0.8], "sin": [0.0]}}"#);
    let out = run(&["solve", p(&cfg)]);
    assert_eq!(out.status.code(), Some(4));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn malformed_config_names_the_key() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", r#"{"anisotropy": {"preset": "dislocation", "alpah": 0.5}}"#);
    let out = run(&["solve", p(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("anisotropy.alpah"));

    let cfg = write(&dir, "d.json", r#"{"anisotropy": {"preset": "coulomb"}, "seed": "x"}"#);
    let out = run(&["analyze", p(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
}

#[test]
fn missing_config_is_an_io_error() {
    let dir = TempDir::new().unwrap();
    let out = run(&["analyze", p(&dir.path().join("absent.json"))]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn single_particle_sits_at_the_origin() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", DISLOCATION);
    let out_dir = dir.path().join("out");
    let out = run(&["simulate", p(&cfg), "--n", "1", "--out", p(&out_dir)]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(out_dir.join("particles.csv")).unwrap();
    let line = csv.lines().nth(1).unwrap();
    let xs: Vec<f64> = line.split(',').map(|s| s.trim().parse().unwrap()).collect();
    assert!(xs[0].abs() < 1e-6 && xs[1].abs() < 1e-6, "{line}");
}

#[test]
fn elliptical_well_keeps_particles_inside() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "c.json",
        r#"{"anisotropy": {"preset": "coulomb"},
            "confinement": {"kind": "elliptical_well", "phi": 0.3, "a1": 0.4, "a2": 0.9}}"#,
    );
    let out_dir = dir.path().join("out");
    let out = run(&["simulate", p(&cfg), "--n", "40", "--out", p(&out_dir)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let shape = anisolog::EllipseShape::new(0.3, 0.4, 0.9);
    let csv = fs::read_to_string(out_dir.join("particles.csv")).unwrap();
    let mut count = 0;
    for line in csv.lines().filter(|l| !l.starts_with('x')) {
        let xs: Vec<f64> = line.split(',').map(|s| s.trim().parse().unwrap()).collect();
        assert!(shape.gauge([xs[0], xs[1]]) <= 1.0 + 1e-9, "{line}");
        count += 1;
    }
    assert_eq!(count, 40);
}

#[test]
fn simulate_matches_continuum_moments_and_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", DISLOCATION);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out_dir in [&a, &b] {
        let out = run(&["simulate", p(&cfg), "--n", "400", "--seed", "42", "--out", p(out_dir)]);
        assert_eq!(out.status.code(), Some(0));
    }
    let summary: Value =
        serde_json::from_str(&fs::read_to_string(a.join("moments.json")).unwrap()).unwrap();
    let m = &summary["second_moments"];
    let m11 = m[0][0].as_f64().unwrap();
    let m22 = m[1][1].as_f64().unwrap();
    assert!((m11 - 0.125).abs() <= 0.05 * 0.125, "{m11}");
    assert!((m22 - 0.375).abs() <= 0.05 * 0.375, "{m22}");
    for file in ["particles.csv", "iterations.csv", "moments.json"] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap(), "{file}");
    }
}

#[test]
fn verify_accepts_solution_and_rejects_circle() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", DISLOCATION);
    let solved = run(&["solve", p(&cfg)]);
    let report = write(&dir, "report.json", &String::from_utf8_lossy(&solved.stdout));
    assert_eq!(run(&["verify", p(&cfg), p(&report)]).status.code(), Some(0));

    let circle = write(&dir, "circle.json", r#"{"kind": "ellipse", "phi": 0.0, "a1": 1.0, "a2": 1.0}"#);
    let out = run(&["verify", p(&cfg), p(&circle)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["interior_max_grad_residual"].as_f64().unwrap() > 1e-3);
}

#[test]
fn verify_rejects_mismatched_prediction() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", DISLOCATION);
    let bad = write(&dir, "bad.json", r#"{"kind": "ellipse", "direction": 0.0}"#);
    assert_eq!(run(&["verify", p(&cfg), p(&bad)]).status.code(), Some(2));
    let neg = write(&dir, "neg.json", r#"{"kind": "ellipse", "phi": 0.0, "a1": -1.0, "a2": 1.0}"#);
    assert_eq!(run(&["verify", p(&cfg), p(&neg)]).status.code(), Some(2));
}

#[test]
fn parseval_passes_for_default_blobs() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", DISLOCATION);
    let out = run(&["parseval", p(&cfg)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["rel_gap"].as_f64().unwrap() < 1e-3);
}
