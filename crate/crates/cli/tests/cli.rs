use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hypercech"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str], input: &Path) -> Output {
    bin().args(args).arg("--input").arg(input).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

const CIRCLE: &str = r#"{"type":"circle","circumference":1.0,"points":[0.0,0.3333333333333333,0.6666666666666666]}"#;
const EQUILATERAL: &str = r#"{"type":"euclidean","dim":2,"points":[[0,0],[1,0],[0.5,0.8660254037844386]]}"#;
const BAD_MATRIX: &str = r#"{"type":"finite","matrix":[[0,1,5],[1,0,1],[5,1,0]]}"#;
const CLOUD: &str =
    r#"{"type":"euclidean","dim":2,"points":[[0,0],[1,0.2],[0.4,1.1],[-0.6,0.5],[0.1,-0.9],[1.3,-0.4]]}"#;

#[test]
fn circle_barcode_has_the_loop() {
    let d = TempDir::new().unwrap();
    let input = write(d.path(), "c.json", CIRCLE);
    let out = run(
        &[
            "persist",
            "--flavor",
            "cech",
            "--schedule",
            "uniform",
            "--mode",
            "ambient",
        ],
        &input,
    );
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("dim,birth,death\n"));
    let h1: Vec<&str> = csv.lines().filter(|l| l.starts_with("1,")).collect();
    assert_eq!(h1.len(), 1);
    let f: Vec<f64> = h1[0].split(',').map(|x| x.parse().unwrap()).collect();
    assert!((f[1] - 1.0 / 6.0).abs() < 1e-12 && (f[2] - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn barcode_to_file_with_summary() {
    let d = TempDir::new().unwrap();
    let input = write(d.path(), "c.json", CIRCLE);
    let path = d.path().join("bars.csv");
    let out = run(&["persist", "--flavor", "vr", "-o", path.to_str().unwrap()], &input);
    assert!(out.status.success());
    assert_eq!(json(&out)["bars"], 4);
    let csv = std::fs::read_to_string(path).unwrap();
    // the Rips loop is born and killed at the same scale
    let h1 = csv.lines().find(|l| l.starts_with("1,")).unwrap();
    let f: Vec<f64> = h1.split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(f[1], f[2]);
}

#[test]
fn rho_of_an_equilateral_triangle() {
    let d = TempDir::new().unwrap();
    let input = write(d.path(), "e.json", EQUILATERAL);
    let out = run(&["rho", "--triple", "0,1,2"], &input);
    assert!(out.status.success());
    let rho = json(&out)["rho"].as_f64().unwrap();
    assert!((rho - 2.0 / 3f64.sqrt()).abs() < 1e-9);
}

#[test]
fn validate_reports_the_violating_triple() {
    let d = TempDir::new().unwrap();
    let input = write(d.path(), "m.json", BAD_MATRIX);
    let out = run(&["validate"], &input);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["valid"], false);
    let t = &v["violations"][0];
    assert_eq!(
        (t["i"].as_u64(), t["k"].as_u64(), t["via"].as_u64()),
        (Some(0), Some(2), Some(1))
    );
    assert!(String::from_utf8(out.stderr).unwrap().contains("InvalidMetric"));
    let good = write(d.path(), "c.json", CIRCLE);
    let out = run(&["validate"], &good);
    assert!(out.status.success());
    assert_eq!(json(&out)["valid"], true);
}

#[test]
fn usage_errors_exit_with_two() {
    let d = TempDir::new().unwrap();
    let input = write(d.path(), "c.json", CIRCLE);
    for args in [
        &["rho", "--triple", "0,1"][..],
        &["persist", "--dim-cap", "6"],
        &["persist", "--weights", "1,1,1"],
        &["extremal", "--start", "bogus"],
        &["inclusions", "--mu", "-1"],
        &["frobnicate"],
    ] {
        let out = run(args, &input);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8(out.stderr).unwrap().contains("Usage"), "{args:?}");
    }
}

#[test]
fn domain_errors_exit_with_one_and_name_the_error() {
    let d = TempDir::new().unwrap();
    let input = write(d.path(), "c.json", CIRCLE);
    let out = run(&["rho", "--triple", "0,1,7"], &input);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("IndexOutOfRange"));
    let out = run(&["persist", "--schedule", "weighted", "--weights", "1,0,1"], &input);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("NonPositiveWeight"));
    let broken = write(d.path(), "b.json", "{\"type\":\"circle\"");
    assert_eq!(run(&["validate"], &broken).status.code(), Some(1));
}

#[test]
fn profile_writes_csv_and_svg_deterministically() {
    let d = TempDir::new().unwrap();
    let input = write(d.path(), "p.json", CLOUD);
    let go = |tag: &str| {
        let csv = d.path().join(format!("{tag}.csv"));
        let svg = d.path().join(format!("{tag}.svg"));
        let out = run(
            &[
                "profile",
                "--n-triples",
                "12",
                "--seed",
                "5",
                "-o",
                csv.to_str().unwrap(),
                "--svg",
                svg.to_str().unwrap(),
            ],
            &input,
        );
        assert!(out.status.success());
        (out.stdout, std::fs::read(csv).unwrap(), std::fs::read(svg).unwrap())
    };
    let a = go("a");
    let b = go("b");
    assert_eq!(a, b);
    let summary: Value = serde_json::from_slice(&a.0).unwrap();
    assert_eq!(summary["examined"], 12);
    assert_eq!(summary["exhaustive"], false);
    let csv = String::from_utf8(a.1).unwrap();
    assert!(csv.starts_with("i,j,k,d12,d13,d23,r,lambda,rho,attained\n"));
    assert!(String::from_utf8(a.2).unwrap().starts_with("<svg"));
}

#[test]
fn expansion_extremal_and_inclusions() {
    let d = TempDir::new().unwrap();
    let circle = write(d.path(), "c.json", CIRCLE);
    let out = run(&["expansion", "--arity", "3", "--tuples", "10"], &circle);
    assert!(out.status.success());
    assert!((json(&out)["mu_hat"].as_f64().unwrap() - 2.0).abs() < 1e-9);

    let cloud = write(d.path(), "p.json", CLOUD);
    let out = run(&["extremal", "--start", "constant:10"], &cloud);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["extremal"], true);
    assert_eq!(v["radii"].as_array().unwrap().len(), 6);
    for seed in ["1", "2"] {
        let a = run(&["extremal", "--seed", seed], &cloud);
        assert!(a.status.success());
        assert_eq!(json(&a)["extremal"], true);
        assert_eq!(a.stdout, run(&["extremal", "--seed", seed], &cloud).stdout);
    }

    let out = run(&["inclusions", "--mu", "1.1547005383792517"], &cloud);
    assert!(out.status.success());
    assert_eq!(json(&out)["ok"], true);
    let out = run(&["inclusions", "--mu", "1.0"], &circle);
    assert!(out.status.success());
    assert_eq!(json(&out)["ok"], false);
}

#[test]
fn every_subcommand_documents_its_defaults() {
    for (sub, default) in [
        ("persist", "[default: 2]"),
        ("profile", "[default: 10000]"),
        ("expansion", "[default: 1000]"),
        ("extremal", "[default: half-max]"),
        ("inclusions", "[default: 1e-9]"),
        ("rho", "[default: ambient"),
        ("validate", "[default: ambient"),
    ] {
        let out = bin().args([sub, "--help"]).output().unwrap();
        assert!(out.status.success());
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.contains(default), "{sub}: {text}");
    }
}
