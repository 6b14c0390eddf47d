use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn c235(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_c235")).args(args).env_remove("C235_TOL").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn close(v: &Value, x: f64) -> bool {
    (v.as_f64().unwrap() - x).abs() <= 1e-15 * x.abs()
}

fn tmp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("c235-{}-{name}", std::process::id()))
}

#[test]
fn list_text_and_json() {
    let o = c235(&["list"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    for id in ["F-power-2", "H-triple-(-1/4,5/12,1/2)", "twistor-case-5"] {
        assert!(text.contains(id), "{id}");
    }
    let v = json(&c235(&["list", "--json"]));
    let arr = v.as_array().unwrap();
    assert!(arr.len() >= 30);
    for e in arr {
        for k in ["id", "picture", "family", "anchor"] {
            assert!(e.get(k).is_some(), "{k}");
        }
    }
    let ids: Vec<&str> = arr.iter().map(|e| e["id"].as_str().unwrap()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
}

#[test]
fn list_filter_by_picture() {
    let v = json(&c235(&["list", "--json", "--filter", "picture=H_of_t"]));
    let arr = v.as_array().unwrap();
    assert!(!arr.is_empty());
    assert!(arr.iter().all(|e| e["picture"] == "H_of_t"));
    let v = json(&c235(&["list", "--json", "--filter", "picture=F_of_q", "--filter", "family=power_m"]));
    assert_eq!(v.as_array().unwrap().len(), 5);
    assert_eq!(code(&c235(&["list", "--filter", "picture"])), 2);
}

#[test]
fn verify_flat_model() {
    let o = c235(&["verify", "--case", "F-power-2"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["version"], 1);
    assert_eq!(v["config"]["pointsPerCase"], 10);
    assert!(close(&v["config"]["tol"], 1e-7));
    let checks = v["cases"][0]["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 30);
    for c in checks {
        for k in ["name", "point", "value", "tol", "pass"] {
            assert!(c.get(k).is_some());
        }
        assert_eq!(c["pass"], true);
    }
    assert_eq!(v["summary"]["failed"], 0);
    assert_eq!(v["summary"]["passed"], 30);
}

#[test]
fn negative_control_exit_codes() {
    let o = c235(&["verify", "--case", "F-power-3", "--points", "3"]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_eq!(v["cases"][0]["expectFail"], true);
    assert!(v["summary"]["failed"].as_u64().unwrap() > 0);
    assert_eq!(code(&c235(&["verify", "--case", "H-power-3", "--points", "2"])), 1);
    let o = c235(&["verify", "--case", "all", "--points", "2"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["summary"]["failed"], v["summary"]["expectedFailures"]);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&c235(&["verify", "--case", "F-power-99"])), 2);
    assert_eq!(code(&c235(&["verify", "--tol", "0"])), 2);
    assert_eq!(code(&c235(&["verify", "--points", "many"])), 2);
    assert_eq!(code(&c235(&["frobnicate"])), 2);
    assert_eq!(code(&c235(&[])), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_c235"))
        .args(["verify", "--case", "F-power-2"])
        .env("C235_TOL", "abc")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn env_tolerance_overrides_default() {
    let o = Command::new(env!("CARGO_BIN_EXE_c235"))
        .args(["verify", "--case", "F-power-2", "--points", "1"])
        .env("C235_TOL", "1e-30")
        .output()
        .unwrap();
    let v = json(&o);
    assert!(close(&v["config"]["tol"], 1e-30));
    assert!(v["cases"][0]["checks"].as_array().unwrap().iter().all(|c| close(&c["tol"], 1e-30)));
    let o = Command::new(env!("CARGO_BIN_EXE_c235"))
        .args(["verify", "--case", "F-power-2", "--points", "1", "--tol", "1e-6"])
        .env("C235_TOL", "1e-30")
        .output()
        .unwrap();
    assert!(close(&json(&o)["config"]["tol"], 1e-6));
}

#[test]
fn deterministic_reports() {
    let a = c235(&["verify", "--case", "all", "--seed", "7", "--points", "5"]);
    let b = c235(&["verify", "--case", "all", "--seed", "7", "--points", "5"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout.last(), Some(&b'\n'));
    let c = c235(&["verify", "--case", "all", "--seed", "8", "--points", "5"]);
    assert_ne!(a.stdout, c.stdout);
    let v = json(&a);
    let ids: Vec<&str> = v["cases"].as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    for case in v["cases"].as_array().unwrap() {
        let pts: Vec<u64> = case["checks"].as_array().unwrap().iter().map(|c| c["point"].as_u64().unwrap()).collect();
        assert!(pts.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn out_file() {
    let path = tmp("report.json");
    let p = path.to_str().unwrap();
    let o = c235(&["verify", "--case", "H-power-2", "--points", "2", "--out", p]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.ends_with('\n'));
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["config"]["outputPath"], p);
    let o = c235(&["verify", "--case", "H-power-2", "--points", "2", "--out", p, "--json"]);
    assert_eq!(o.stdout, std::fs::read(&path).unwrap());
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn identities() {
    let o = c235(&["identities", "--kind", "quadratic", "--samples", "10"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["summary"]["passed"], 10);
    assert_eq!(v["summary"]["failed"], 0);
    assert_eq!(code(&c235(&["identities", "--kind", "cubic"])), 0);
    assert_eq!(code(&c235(&["identities", "--kind", "wronskian,degree6", "--samples", "3"])), 0);
    assert_eq!(code(&c235(&["identities"])), 0);
    assert_eq!(code(&c235(&["identities", "--kind", "quintic"])), 2);
}

#[test]
fn curvature_reports() {
    let o = c235(&["curvature", "--case", "F-elementary-r", "--point", "r=2,x=0.1,y=0.2,z=0.3,p=0.4"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!((v["ricciRr"].as_f64().unwrap() - 2.0).abs() < 1e-8);
    assert_eq!(v["dim"], 5);
    let o = c235(&["curvature", "--case", "F-power-2", "--point", "q=1.5,x=0.2,y=-0.1,z=0.3,p=0.5"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!(v["weyl"].as_array().unwrap().iter().all(|w| w.as_f64().unwrap().abs() < 1e-9));
    assert_eq!(code(&c235(&["curvature", "--case", "F-power-2", "--point", "q=1.5,w=2"])), 2);
    assert_eq!(code(&c235(&["curvature", "--case", "F-power-2", "--point", "garbage"])), 2);
    assert_eq!(code(&c235(&["curvature", "--case", "missing", "--point", "q=1"])), 2);
}
