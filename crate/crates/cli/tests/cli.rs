//! Runs the `hexa` binary end to end.

use std::path::PathBuf;
use std::process::{Command, Output};

fn hexa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hexa")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("hexa-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

#[test]
fn dd_verify_one_cube() {
    let o = hexa(&["dd-verify", "--cubes", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("13 configurations, weighted sum 14"), "{s}");
    assert!(s.contains("bijection verified"));
}

#[test]
fn limitshape_lambda() {
    let o = hexa(&["limitshape", "--params", "1,1,2,3", "--lambda"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "66/31");
    let o = hexa(&["limitshape", "--params", "1,2,1,3", "--lambda"]);
    assert_eq!(stdout(&o).trim(), "3");
}

#[test]
fn limitshape_real_critical_params() {
    let o = hexa(&["limitshape", "--params", "1,2*sqrt(3),sqrt(3),9", "--lambda"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("3"), "{}", stdout(&o));
}

#[test]
fn minor_check_residuals_vanish() {
    let o = hexa(&["ising", "minor-check", "--dim", "4", "--trials", "100"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("all residuals exactly 0"));
}

#[test]
fn ydelta_exact_round_trip() {
    let o = hexa(&["ising", "ydelta", "--weights", "1/12,1/8,1/3"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("(17/11, 17/9, 17/4)"), "{s}");
    assert!(s.contains("preserved"));
    let o = hexa(&["ising", "ydelta", "--weights", "17/11,17/9,17/4", "--direction", "delta-to-y"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("(12, 8, 3)"), "{}", stdout(&o));
}

#[test]
fn isotropic_propagation_gives_powers_of_14() {
    let o = hexa(&["--json", "propagate", "--isotropic", "1,1,1,1", "--level", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let s = v.to_string();
    for p in ["196", "38416", "7529536"] {
        assert!(s.contains(p), "{p} missing from {s}");
    }
}

#[test]
fn propagate_from_file() {
    let d = scratch("prop");
    std::fs::create_dir_all(&d).unwrap();
    let input = d.join("in.json");
    let pts: Vec<_> = [
        "0,0,0", "1,0,0", "0,1,0", "0,0,1", "1,1,0", "1,0,1", "0,1,1", "0,1/2,1/2", "1/2,0,1/2", "1/2,1/2,0",
    ]
    .iter()
    .map(|p| serde_json::json!({ "point": p, "value": "1" }))
    .collect();
    std::fs::write(&input, serde_json::to_string(&pts).unwrap()).unwrap();
    let o = hexa(&["propagate", "--input", input.to_str().unwrap(), "--level", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("14"), "{}", stdout(&o));
    let _ = std::fs::remove_dir_all(&d);
}

#[test]
fn expand_is_positive() {
    let o = hexa(&["--json", "expand", "--cubes", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["terms"], 39);
    assert_eq!(v["positive"], true);
}

#[test]
fn homogeneity_builtins() {
    let o = hexa(&["homogeneity", "octahedron"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("1.41421356"), "{s}");
    let o = hexa(&["homogeneity", "cube"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("1.31607401"), "{}", stdout(&o));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(hexa(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(hexa(&["dd-verify", "--cubes", "x"]).status.code(), Some(2));
    assert_eq!(hexa(&["--precision", "8", "limitshape", "--lambda"]).status.code(), Some(2));
    assert_eq!(hexa(&["limitshape", "--params", "1,2", "--lambda"]).status.code(), Some(2));
    assert_eq!(hexa(&["propagate", "--input", "/nonexistent/input.json"]).status.code(), Some(2));
    assert_eq!(hexa(&["homogeneity", "/nonexistent/rec.txt"]).status.code(), Some(2));
    assert_eq!(hexa(&["dd-enumerate", "--levels", "4"]).status.code(), Some(2));
    assert_eq!(hexa(&["--help"]).status.code(), Some(0));
}

#[test]
fn seeded_runs_are_reproducible() {
    let run = |seed: &str| hexa(&["--seed", seed, "--json", "ising", "kashaev", "--trials", "5"]).stdout;
    assert_eq!(run("3"), run("3"));
    let a = hexa(&["--seed", "11", "ising", "grouping"]).stdout;
    assert_eq!(a, hexa(&["--seed", "11", "ising", "grouping"]).stdout);
}

#[test]
fn artifacts_land_in_out_dir() {
    let d = scratch("art");
    let o = hexa(&["--out", d.to_str().unwrap(), "dd-enumerate", "--cubes", "1", "--svg"]);
    assert_eq!(o.status.code(), Some(0));
    let cfg: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("configs.json")).unwrap()).unwrap();
    assert_eq!(cfg["count"], 13);
    assert!(std::fs::read_to_string(d.join("config_0000.svg")).unwrap().starts_with("<svg"));
    assert!(d.join("config_0012.svg").exists());

    let o = hexa(&["--out", d.to_str().unwrap(), "--grid", "16", "limitshape", "--cube", "--arctic", "--gfield", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(d.join("arctic.csv").exists());
    assert!(d.join("gfield_004.csv").exists());
    let _ = std::fs::remove_dir_all(&d);
}

#[test]
fn det_check_passes() {
    let o = hexa(&["--json", "limitshape", "--det"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["p1_divides"], true);
}
