use std::path::PathBuf;
use std::process::{Command, Output};

use cuplength::fixtures;
use cuplength_cli::io::{load_distance_csv, load_filtered_complex};
use cuplength_cli::json;

const KLEIN_JSON: &str = r#"{"points":[{"birth":1,"death":3,"inf":false,"value":1},{"birth":2,"death":3,"inf":false,"value":2},{"birth":2,"inf":true,"value":2}]}"#;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn cuplength(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cuplength")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn fixture_files_match_generated_fixtures() {
    let cases = [
        ("hollow_triangle.txt", fixtures::hollow_triangle()),
        ("filled_triangle.txt", fixtures::filled_triangle()),
        ("two_disks.txt", fixtures::two_disks()),
        ("rp2.txt", fixtures::rp2()),
        ("torus7.txt", fixtures::torus7()),
        ("klein.txt", fixtures::klein()),
    ];
    for (file, c) in cases {
        assert_eq!(load_filtered_complex(fixture(file)).unwrap(), c, "{file}");
    }
    let klein = load_filtered_complex(fixture("klein.txt")).unwrap();
    assert_eq!(klein.critical_values(), &[0.0, 1.0, 2.0, 3.0]);
    let d = load_distance_csv(fixture("unit_square.csv")).unwrap();
    assert_eq!(d, fixtures::unit_square_distances());
    let c = cuplength::build_vietoris_rips(&d, 3, f64::INFINITY).unwrap();
    assert_eq!(c, fixtures::square_vr(2));
}

#[test]
fn klein_cup_diagram_json() {
    let out = cuplength(&["cup-diagram", &fixture("klein.txt"), "--max-dim", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), format!("{KLEIN_JSON}\n"));
    let d = json::diagram_from_str(stdout(&out).trim()).unwrap();
    assert_eq!(json::diagram_to_string(&d), KLEIN_JSON);
}

#[test]
fn serial_run_matches_default() {
    let serial = Command::new(env!("CARGO_BIN_EXE_cuplength"))
        .args(["cup-diagram", &fixture("torus7.txt")])
        .env("CUPLENGTH_THREADS", "1")
        .output()
        .unwrap();
    let parallel = cuplength(&["cup-diagram", &fixture("torus7.txt")]);
    assert_eq!(serial.stdout, parallel.stdout);
}

#[test]
fn erosion_of_presets() {
    let out = cuplength(&["erosion", "preset:vr-torus", "preset:vr-wedge-lower"]);
    assert!(out.status.success());
    let d: f64 = stdout(&out).trim().parse().unwrap();
    assert!((d - std::f64::consts::FRAC_PI_3).abs() < 1e-9);
    let out = cuplength(&["erosion", "preset:vr-torus", "preset:vr-wedge-lower", "--format", "json"]);
    assert!(stdout(&out).starts_with(r#"{"distance":1.047197551196"#));
}

#[test]
fn erosion_reads_json_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("klein.json");
    let out = cuplength(&["cup-function", &fixture("klein.txt"), "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    let f = json::function_from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(f.at(2.0, 2.5), 2);
    let out = cuplength(&["erosion", path.to_str().unwrap(), &fixture("klein.txt")]);
    assert_eq!(stdout(&out).trim(), "0");
}

#[test]
fn oracle_check_exit_codes() {
    let out = cuplength(&["oracle-check", &fixture("hollow_triangle.txt")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("ok:"));
    let out = cuplength(&["oracle-check", &fixture("unit_square.csv"), "--max-dim", "1"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn plot_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.svg");
    let b = dir.path().join("b.svg");
    for p in [&a, &b] {
        let out = cuplength(&["plot", &fixture("klein.txt"), "--output", p.to_str().unwrap()]);
        assert!(out.status.success());
    }
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert_eq!(a, b);
    let svg = String::from_utf8(a).unwrap();
    assert!(svg.contains("∞"));
    assert_eq!(svg.matches("<circle").count(), 3);
}

#[test]
fn vr_output_loads_back() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("square.json");
    let out = cuplength(&["vr", &fixture("unit_square.csv"), "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(load_filtered_complex(&path).unwrap(), fixtures::square_vr(2));
    let out = cuplength(&["vr", &fixture("unit_square.csv"), "--max-scale", "1"]);
    let c: json::ComplexJson = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(c.simplices.len(), 8);
}

#[test]
fn barcode_outputs() {
    let out = cuplength(&["barcode", &fixture("klein.txt")]);
    let b: json::BarcodeJson = serde_json::from_slice(&out.stdout).unwrap();
    let dims: Vec<usize> = b.bars.iter().map(|bar| bar.dim).collect();
    assert_eq!(dims, [1, 1, 2]);
    assert_eq!(b.degree_zero.len(), 1);
    assert!(b.degree_zero[0].inf);
    let out = cuplength(&["barcode", &fixture("klein.txt"), "--format", "csv"]);
    assert_eq!(stdout(&out), "dim,birth,death\n0,0,inf\n1,1,3\n1,2,inf\n2,2,inf\n");
}

#[test]
fn errors_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "0,1\n2,0\n").unwrap();
    let out = cuplength(&["vr", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("asymmetric"));

    let out = cuplength(&["barcode", "/nonexistent/file.txt"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read"));

    let out = cuplength(&["barcode", &fixture("klein.txt"), "--max-dim", "0"]);
    assert_eq!(out.status.code(), Some(2));

    let out = cuplength(&["cup-function", &fixture("klein.txt"), "--format", "csv"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot write csv"));
}
