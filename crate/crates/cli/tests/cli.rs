use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn qmet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmet")).args(args).output().expect("binary runs")
}

fn qmet_data(args: &[&str]) -> Output {
    let args: Vec<String> = args
        .iter()
        .map(|a| if a.ends_with(".json") { data(a).display().to_string() } else { a.to_string() })
        .collect();
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    qmet(&refs)
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn validate() {
    let out = qmet_data(&["validate", "s2.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["status"], "proven");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"points": ["a", "b"], "dist": [["0", "1"], ["-2", "0"]]}"#).unwrap();
    let out = qmet(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dist[1][0]"));

    fs::write(&bad, "{\"points\": [\"a\"],\n\"dist\": [[\"0\"]").unwrap();
    let out = qmet(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn rho_of_representables() {
    let out = qmet_data(&["rho", "--phi", "y_a.json", "--psi", "y_b.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out), "1");
}

#[test]
fn order_and_colimits() {
    let v = stdout_json(&qmet_data(&["order", "s2z.json"]));
    assert_eq!(v["covers"], serde_json::json!([["a", "b"]]));
    let v = stdout_json(&qmet_data(&["colim", "y_b.json"]));
    assert_eq!(v["colimit"], "b");
    let v = stdout_json(&qmet_data(&["colim", "flat_s2.json"]));
    assert_eq!(v["colimit"], Value::Null);
}

#[test]
fn ideal_and_boundedness() {
    let out = qmet_data(&["ideal-check", "y_a.json"]);
    assert_eq!(out.status.code(), Some(0));
    let out = qmet_data(&["ideal-check", "not_ideal_s2.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["witness"]["kind"], "weight");

    let v = stdout_json(&qmet_data(&["bounded-check", "y_a.json"]));
    assert_eq!(v["verdict"], "bounded");
    let v = stdout_json(&qmet_data(&["bounded-check", "net_s2.json"]));
    assert_eq!(v["verdict"], "bounded");
    let v = stdout_json(&qmet_data(&["bounded-check", "--horizon", "8", "net_nat.json"]));
    assert_eq!(v["verdict"], "stage");
    assert_eq!(v["value"]["limit"], Value::Null);
    let v = stdout_json(&qmet_data(&["bounded-check", "net_qlo.json"]));
    assert_eq!(v["horizon"], 32);
}

#[test]
fn balls() {
    let v = stdout_json(&qmet_data(&["ball-lub", "s2.json", "ball_a.json"]));
    assert_eq!(v["lub"], serde_json::json!({"point": "a", "radius": "3/2"}));
    let v = stdout_json(&qmet_data(&["family-join", "family_y_a.json"]));
    assert_eq!(v["join"], serde_json::json!({"point": "a", "radius": "1"}));
}

#[test]
fn waybelow_and_closure() {
    let out = qmet_data(&["waybelow", "s2.json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["estimate"], serde_json::json!([["0", "1"], ["2", "0"]]));

    let battery = data("battery_s2.json");
    let out = qmet_data(&["closure", "flat_s2.json", "--battery", battery.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["values"], serde_json::json!(["1", "1"]));
}

#[test]
fn suite_and_replay() {
    let out = qmet(&["suite", "yoneda-lemma", "--seed", "7", "--trials", "500"]);
    assert_eq!(out.status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = qmet(&["suite", "qlo-refutations", "--horizon", "8", "--out", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let checks = v["checks"].as_array().unwrap();

    let find = |name: &str| checks.iter().find(|c| c["verdict"]["check"] == name).unwrap().clone();
    let record = dir.path().join("record.json");
    fs::write(&record, find("qlo-local-dcpo").to_string()).unwrap();
    assert_eq!(qmet(&["replay", record.to_str().unwrap()]).status.code(), Some(2));

    fs::write(&record, find("bounded-net-controls").to_string()).unwrap();
    assert_eq!(qmet(&["replay", record.to_str().unwrap()]).status.code(), Some(0));

    let mut tampered = find("qlo-bounded-ideal-colimit");
    tampered["verdict"]["witness"]["failures"][0]["distance"] = Value::from("1/7");
    fs::write(&record, tampered.to_string()).unwrap();
    assert_eq!(qmet(&["replay", record.to_str().unwrap()]).status.code(), Some(4));

    fs::write(&record, "{\"suite\": 3}").unwrap();
    assert_eq!(qmet(&["replay", record.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn outputs_are_byte_deterministic() {
    let run = || qmet(&["suite", "distributor-laws", "--seed", "3", "--trials", "20"]).stdout;
    let strip = |bytes: Vec<u8>| {
        let mut v: Value = serde_json::from_slice(&bytes).unwrap();
        v["elapsed_ms"] = Value::from(0);
        v
    };
    assert_eq!(strip(run()), strip(run()));
    let a = qmet_data(&["export-dot", "--kind", "balls", "--grid-step", "1/2", "--grid-max", "1", "s2.json"]);
    let b = qmet_data(&["export-dot", "--kind", "balls", "--grid-step", "1/2", "--grid-max", "1", "s2.json"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn dot_export() {
    let out = qmet_data(&["export-dot", "s2.json"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains("->"));
    let out = qmet_data(&["export-dot", "s2z.json"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("\"a\" -> \"b\";"));
    let out = qmet_data(&["export-dot", "--kind", "balls", "--grid-step", "1", "--grid-max", "2", "singleton.json"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"⋆@2\" -> \"⋆@1\";") && text.contains("\"⋆@1\" -> \"⋆@0\";"));
    let out = qmet_data(&["export-dot", "--kind", "balls", "--grid-step", "0", "singleton.json"]);
    assert_eq!(out.status.code(), Some(1));
}
