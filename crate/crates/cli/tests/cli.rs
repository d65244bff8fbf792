use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn gptlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gptlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = gptlab(&all);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: Value = serde_json::from_slice(&out.stdout).expect("valid JSON");
    assert_eq!(v["schema"], 1);
    v
}

fn as_f64(v: &Value) -> f64 {
    match v {
        Value::String(s) => {
            let (n, d) = s.split_once('/').unwrap_or((s, "1"));
            n.parse::<f64>().unwrap() / d.parse::<f64>().unwrap()
        }
        other => other.as_f64().expect("number"),
    }
}

#[test]
fn analyze_pentagon() {
    let v = json(&["analyze", "ngon:5"]);
    assert_eq!(v["bitSymmetric"], true);
    assert_eq!(v["selfDual"], true);
    assert!((as_f64(&v["c"]) + 0.809_017_0).abs() < 1e-6);
}

#[test]
fn analyze_square() {
    let v = json(&["analyze", "square"]);
    assert_eq!(v["bitSymmetric"], false);
    assert_eq!(v["selfDual"], false);
    assert_eq!(v["orbitCount"], 2);
}

#[test]
fn analyze_tetrahedron() {
    let v = json(&["analyze", "simplex:4"]);
    assert_eq!(v["bitSymmetric"], true);
    assert_eq!(v["selfDual"], true);
    assert_eq!(v["groupOrder"], 24);
}

#[test]
fn text_and_json_verdicts_agree() {
    for spec in ["square", "ngon:5", "ngon:6", "simplex:3"] {
        let v = json(&["analyze", spec]);
        let text = stdout(&gptlab(&["analyze", spec]));
        for (label, key) in [
            ("bitSymmetric", "bitSymmetric"),
            ("selfDual", "selfDual"),
            ("orbitCount", "orbitCount"),
        ] {
            let line = text
                .lines()
                .find(|l| l.starts_with(&format!("{label}:")))
                .unwrap_or_else(|| panic!("{spec}: no {label} line"));
            let shown = line.split_once(':').unwrap().1.trim();
            assert_eq!(shown, v[key].to_string(), "{spec} {label}");
        }
    }
}

#[test]
fn tensor_square_square() {
    let v = json(&["tensor", "square", "square", "--classify", "--chsh"]);
    assert_eq!(v["vertexCount"], 24);
    assert_eq!(v["entangled"], 8);
    assert_eq!(v["chsh"]["max"], "4");
    assert_eq!(v["classes"].as_array().unwrap().len(), 24);
}

#[test]
fn tensor_classical() {
    let v = json(&["tensor", "simplex:3", "simplex:3", "--classify"]);
    assert_eq!(v["vertexCount"], 9);
    assert_eq!(v["entangled"], 0);
}

#[test]
fn tensor_pentagons_predicted() {
    let v = json(&["tensor", "ngon:5", "ngon:5", "--check-theorem2"]);
    assert_eq!(v["theorem2"]["verdict"], "predicted-not-bit-symmetric");
}

#[test]
fn tensor_budget_exit_code() {
    let out = gptlab(&["tensor", "cube:3", "cube:3", "--budget", "10"]);
    assert_eq!(out.status.code(), Some(3));
    let out = gptlab(&[
        "tensor",
        "cube:3",
        "cube:3",
        "--classify",
        "--ray-limit",
        "50",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn custom_chsh_setup() {
    let dir = tempfile::tempdir().unwrap();
    let setup = dir.path().join("setup.json");
    // Both sides measure the same x-coordinate twice: a local strategy.
    fs::write(
        &setup,
        r#"{"alice":[["1/2","0","1/2"],["1/2","0","1/2"]],"bob":[["1/2","0","1/2"],["0","1/2","1/2"]]}"#,
    )
    .unwrap();
    let v = json(&[
        "tensor",
        "square",
        "square",
        "--chsh",
        "--setup",
        setup.to_str().unwrap(),
    ]);
    assert_eq!(v["chsh"]["max"], "2");

    fs::write(&setup, r#"{"alice":[["1","0","0"],["1/2","0","1/2"]],"bob":[["1/2","0","1/2"],["0","1/2","1/2"]]}"#)
        .unwrap();
    let out = gptlab(&[
        "tensor",
        "square",
        "square",
        "--chsh",
        "--setup",
        setup.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn distinguish_examples() {
    let out = gptlab(&["distinguish", "square", "0", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("witness effect"));
    let v = json(&["distinguish", "square", "0", "1"]);
    assert_eq!(v["distinguishable"], true);

    let out = gptlab(&["distinguish", "ngon:5", "0", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("not distinguishable"));

    assert_eq!(
        gptlab(&["distinguish", "simplex:3", "0", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        gptlab(&["distinguish", "square", "0", "4"]).status.code(),
        Some(2)
    );
}

#[test]
fn parse_and_validation_errors_exit_2() {
    assert_eq!(gptlab(&["analyze", "ngon:2"]).status.code(), Some(2));
    assert_eq!(gptlab(&["analyze", "no-such-space"]).status.code(), Some(2));
    assert_eq!(
        gptlab(&["analyze", "square", "--tolerance", "0"])
            .status
            .code(),
        Some(2)
    );
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"name":"x","dimension":3,"arithmetic":"exact","unit":["0","0","1"],"vertices":[["1","1"]]}"#)
        .unwrap();
    assert_eq!(
        gptlab(&["analyze", bad.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn exported_space_and_report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("pentagon.json");
    let export = gptlab(&["catalog", "--export", "ngon:5"]);
    assert_eq!(export.status.code(), Some(0));
    fs::write(&file, &export.stdout).unwrap();
    let from_file = json(&["analyze", file.to_str().unwrap()]);
    let from_catalog = json(&["analyze", "ngon:5"]);
    for key in ["groupOrder", "bitSymmetric", "selfDual", "orbitCount"] {
        assert_eq!(from_file[key], from_catalog[key], "{key}");
    }

    let report = dir.path().join("report.json");
    fs::write(&report, serde_json::to_string(&from_catalog).unwrap()).unwrap();
    let ok = gptlab(&["analyze", "ngon:5", "--recheck", report.to_str().unwrap()]);
    assert_eq!(
        ok.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ok.stderr)
    );

    let mut tampered = from_catalog.clone();
    tampered["orbitCount"] = Value::from(2);
    fs::write(&report, serde_json::to_string(&tampered).unwrap()).unwrap();
    let caught = gptlab(&["analyze", "ngon:5", "--recheck", report.to_str().unwrap()]);
    assert_eq!(caught.status.code(), Some(2));
}

#[test]
fn catalog_listing() {
    let v = json(&["catalog"]);
    let specs: Vec<&str> = v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["spec"].as_str().unwrap())
        .collect();
    assert_eq!(specs, ["square", "ngon:N", "simplex:N", "cube:N", "<path>"]);
}

#[test]
fn jobs_flag_is_accepted() {
    let v = json(&["analyze", "ngon:7", "--jobs", "1"]);
    assert_eq!(v["bitSymmetric"], true);
    assert_eq!(
        gptlab(&["analyze", "ngon:7", "--jobs", "0"]).status.code(),
        Some(2)
    );
}
