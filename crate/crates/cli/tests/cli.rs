use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::Command;

use rotframe::SurfaceMesh;
use rotframe_cli::{run, EXIT_CHECK_FAILED, EXIT_PASS, EXIT_USAGE};
use serde_json::Value;

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("rotframe").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = invoke(args);
    assert_eq!(code, EXIT_PASS, "{err}");
    serde_json::from_str(&out).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("rotframe-cli-{}-{name}", std::process::id()))
}

#[test]
fn quantify_example() {
    let v = json(&["quantify", "--l", "0", "--parity", "even", "--k", "2", "--count", "3"]);
    let sizes: Vec<f64> = v["sizes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_f64().unwrap())
        .collect();
    for (i, r) in sizes.iter().enumerate() {
        assert!((r - PI * (i + 1) as f64 / 2.0).abs() < 1e-12);
    }
    assert_eq!(v["mode"]["parity"], "even");
}

#[test]
fn metric_on_light_cylinder() {
    let v = json(&["metric", "--expr", "z(1)", "--point", "1,0,0", "--time", "0"]);
    assert_eq!(v["coefficients"]["g_tt"].as_f64().unwrap(), 0.0);
    let v = json(&["metric", "--expr", "z(1)", "--point", "1,0,0", "--c", "2"]);
    assert_eq!(v["coefficients"]["g_tt"].as_f64().unwrap(), 3.0);
}

#[test]
fn metric_csv_has_one_row_per_coefficient() {
    let (code, out, _) = invoke(&[
        "metric",
        "--expr",
        "z(1)*x(2)",
        "--point",
        "0.1,-0.2,0.3",
        "--format",
        "csv",
    ]);
    assert_eq!(code, EXIT_PASS);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "coefficient,value");
    assert_eq!(lines.len(), 11);
    assert!(lines[1].starts_with("g_tt,"));
    assert!(lines[10].starts_with("g_zz,"));
}

#[test]
fn averaged_metric_matches_closed_form() {
    let v = json(&["metric", "--expr", "z(1)*x(1)", "--point", "0.3,0.2,0.1", "--average"]);
    let gtt = v["coefficients"]["g_tt"].as_f64().unwrap();
    let closed = 1.0 - (1.5 * 0.09 + 1.5 * 0.04 + 0.01);
    assert!((gtt - closed).abs() < 1e-12);
}

#[test]
fn props_is_byte_identical_across_runs() {
    let a = invoke(&["props", "--trials", "100", "--seed", "7"]);
    let b = invoke(&["props", "--trials", "100", "--seed", "7"]);
    assert_eq!(a.0, EXIT_PASS, "{}", a.2);
    assert_eq!(a.1, b.1);
    let c = invoke(&["props", "--trials", "100", "--seed", "8"]);
    assert_ne!(a.1, c.1);
}

#[test]
fn failed_check_exits_one() {
    let (code, out, _) = invoke(&["props", "--expr", "z(1)*x(2)", "--tol", "1e-300"]);
    assert_eq!(code, EXIT_CHECK_FAILED);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["passed"], false);
    let (code, _, _) = invoke(&["residual", "kleingordon", "--profile", "breathing", "--tau", "0.4"]);
    assert_eq!(code, EXIT_CHECK_FAILED);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["props", "--bogus"],
        vec!["metric", "--expr", "z(1", "--point", "1,0,0"],
        vec!["metric", "--expr", "z(1)", "--point", "1,0"],
        vec!["metric", "--expr", "u(1,1,0)(1)", "--point", "1,0,0"],
        vec!["quantify", "--format", "obj"],
        vec!["quantify", "--c", "-1"],
        vec!["residual", "schrodinger", "--stencil", "4"],
        vec!["residual", "schrodinger", "--beta", "1.2"],
        vec!["frobnicate"],
    ] {
        let (code, _, err) = invoke(&args);
        assert_eq!(code, EXIT_USAGE, "{args:?}: {err}");
        assert!(!err.is_empty());
    }
    let (code, _, err) = invoke(&["quantify", "--out", "/nonexistent-dir/x.json"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("cannot write"));
}

#[test]
fn config_file_with_flag_override() {
    let cfg = scratch("config.json");
    std::fs::write(&cfg, r#"{"c": 2.0, "format": "csv"}"#).unwrap();
    let path = cfg.to_str().unwrap();
    let (code, out, _) = invoke(&["metric", "--expr", "z(1)", "--point", "1,0,0", "--config", path]);
    assert_eq!(code, EXIT_PASS);
    assert!(out.contains("g_tt,3.0000000000000000e0"));
    let (_, out, _) = invoke(&[
        "metric", "--expr", "z(1)", "--point", "1,0,0", "--config", path, "--c", "1", "--format", "json",
    ]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["coefficients"]["g_tt"].as_f64().unwrap(), 0.0);

    std::fs::write(&cfg, r#"{"speed": 2.0}"#).unwrap();
    let (code, _, _) = invoke(&["quantify", "--config", path]);
    assert_eq!(code, EXIT_USAGE);
    std::fs::remove_file(&cfg).unwrap();
}

#[test]
fn surface_obj_is_closed_mesh() {
    let path = scratch("surface.obj");
    let out = path.to_str().unwrap();
    let (code, stdout, _) = invoke(&[
        "surface",
        "--kind",
        "ellipsoid",
        "--omega",
        "1,2,0.5",
        "--resolution",
        "12,16",
        "--format",
        "obj",
        "--out",
        out,
    ]);
    assert_eq!(code, EXIT_PASS);
    assert!(stdout.is_empty());
    let mesh = SurfaceMesh::from_obj(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(mesh.is_closed_and_oriented());
    assert_eq!(mesh.vertices.len(), 10 * 16 + 2);
    std::fs::remove_file(&path).unwrap();

    let (code, out, _) = invoke(&[
        "surface",
        "--kind",
        "cylinder",
        "--omega",
        "2",
        "--resolution",
        "32,8",
        "--format",
        "obj",
    ]);
    assert_eq!(code, EXIT_PASS);
    assert_eq!(out.lines().filter(|l| l.starts_with("v ")).count(), 256);
    let (code, _, _) = invoke(&["surface", "--resolution", "4,4"]);
    assert_eq!(code, EXIT_CHECK_FAILED);
}

#[test]
fn numeric_surface_matches_ellipsoid() {
    let v = json(&[
        "surface",
        "--kind",
        "numeric",
        "--expr",
        "z(1)*x(1)*y(1)",
        "--r-max",
        "3",
        "--resolution",
        "8,8",
    ]);
    let pole = v["vertices"][0].as_array().unwrap();
    let r = pole.iter().map(|c| c.as_f64().unwrap().powi(2)).sum::<f64>().sqrt();
    assert!((r - 1.0 / 1.5f64.sqrt()).abs() < 1e-9);
    assert_eq!(v["closed"], true);
}

#[test]
fn residual_reports() {
    let v = json(&[
        "residual",
        "schrodinger",
        "--profile",
        "gaussian",
        "--omega",
        "5",
        "--h",
        "0.02",
        "--samples",
        "5",
    ]);
    assert!((v["order_estimate"].as_f64().unwrap() - 2.0).abs() < 0.1);
    assert_eq!(v["grid"]["h"].as_f64().unwrap(), 0.02);
    let v = json(&["residual", "kleingordon", "--profile", "constant", "--beta", "0.4"]);
    assert!(v["max"].as_f64().unwrap() <= 1e-12);
    let (code, out, _) = invoke(&[
        "residual",
        "kleingordon",
        "--profile",
        "plane",
        "--samples",
        "2",
        "--format",
        "csv",
    ]);
    assert_eq!(code, EXIT_PASS);
    assert_eq!(out.lines().next(), Some("x,y,z,re,im"));
    assert_eq!(out.lines().count(), 9);
}

#[test]
fn twosource_scan() {
    let v = json(&["twosource", "--signs", "same"]);
    let a: Vec<f64> = v["cancelling"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert_eq!(a.len(), 4);
    assert!((a[0] - PI / 2.0).abs() < 1e-12);
    let (_, out, _) = invoke(&["twosource", "--profile", "zero", "--points", "10", "--format", "csv"]);
    assert_eq!(out.lines().filter(|l| l.ends_with(",true")).count(), 10);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_rotframe");
    let ok = Command::new(bin).args(["quantify", "--count", "2"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_PASS));
    let bad = Command::new(bin).args(["quantify", "--count", "x"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
    let fail = Command::new(bin)
        .args(["props", "--expr", "z(1)*x(2)", "--tol", "1e-300"])
        .output()
        .unwrap();
    assert_eq!(fail.status.code(), Some(EXIT_CHECK_FAILED));
    let help = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(EXIT_PASS));
}
