use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use sha2::{Digest, Sha256};
use tempfile::TempDir;

const CP1: &str = r#"{"model": {"dim": 1, "facets": ["F1", "F2"], "vertices": [["F1"], ["F2"]]},
 "labels": {"F1": [1], "F2": [-1]}}"#;
const CP1_SWAPPED: &str = r#"{"model": {"dim": 1, "facets": ["F1", "F2"], "vertices": [["F1"], ["F2"]]},
 "labels": {"F1": [-1], "F2": [1]}}"#;
const CP2: &str = r#"{"model": {"dim": 2, "facets": ["F1", "F2", "F3"],
 "vertices": [["F1", "F2"], ["F2", "F3"], ["F1", "F3"]]},
 "labels": {"F1": [1, 0], "F2": [0, 1], "F3": [-1, -1]}}"#;
const ORBIFOLD: &str = r#"{"model": {"dim": 2, "facets": ["F1", "F2", "F3"],
 "vertices": [["F1", "F2"], ["F2", "F3"], ["F1", "F3"]]},
 "labels": {"F1": [1, 0], "F2": [0, 1], "F3": [-2, -3]}}"#;
const PROPORTIONAL: &str = r#"{"model": {"dim": 2, "facets": ["F1", "F2", "F3"],
 "vertices": [["F1", "F2"], ["F2", "F3"], ["F1", "F3"]]},
 "labels": {"F1": [1, 0], "F2": [2, 0], "F3": [-1, -1]}}"#;
const TRIANGLE: &str = r#"{"model": {"dim": 2, "facets": ["F1", "F2", "F3"],
 "vertices": [["F1", "F2"], ["F2", "F3"], ["F1", "F3"]]},
 "labels": {"F1": [1], "F2": [1], "F3": [2]}}"#;
const HEXAGON: &str = r#"{"model": {"dim": 2, "facets": ["F1", "F2", "F3", "H12", "H13", "H23"],
 "vertices": [["F1", "H12"], ["F2", "H12"], ["F1", "H13"], ["F3", "H13"], ["F2", "H23"], ["F3", "H23"]],
 "exceptional": ["H12", "H13", "H23"]},
 "labels": {"F1": [1], "F2": [1], "F3": [2]}}"#;
const PRISM: &str = r#"{"model": {"dim": 3, "facets": ["A", "B", "C", "BOTTOM", "TOP"],
 "vertices": [["A", "B", "BOTTOM"], ["A", "C", "BOTTOM"], ["B", "C", "BOTTOM"],
              ["A", "B", "TOP"], ["A", "C", "TOP"], ["B", "C", "TOP"]],
 "exceptional": ["TOP", "BOTTOM"]},
 "labels": {"A": [1, 0], "B": [0, 1], "C": [1, 1]}}"#;

struct Run {
    code: i32,
    stdout: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("{e}: {}", self.stdout))
    }
}

struct Files(TempDir);

impl Files {
    fn new() -> Self {
        Files(TempDir::new().unwrap())
    }

    fn write(&self, name: &str, contents: &str) -> PathBuf {
        let p = self.0.path().join(name);
        fs::write(&p, contents).unwrap();
        p
    }
}

fn qtorb(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_qtorb")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
    }
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_smooth_model() {
    let f = Files::new();
    let input = f.write("cp2.json", CP2);
    let r = qtorb(&["validate", path(&input)]);
    assert_eq!(r.code, 0);
    let j = r.json();
    assert_eq!(j["status"], "pass");
    assert_eq!(j["smooth"], true);
    assert_eq!(j["tool"], "qtorb");
    assert_eq!(j["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(j["inputs"][0], format!("{:x}", Sha256::digest(CP2.as_bytes())));
}

#[test]
fn validate_orbifold_reports_local_groups() {
    let f = Files::new();
    let r = qtorb(&["validate", path(&f.write("orb.json", ORBIFOLD))]);
    assert_eq!(r.code, 0);
    let j = r.json();
    assert_eq!(j["smooth"], false);
    assert_eq!(j["vertex_orders"], serde_json::json!([1, 2, 3]));
}

#[test]
fn validate_reports_dependent_vertex() {
    let f = Files::new();
    let r = qtorb(&["validate", path(&f.write("bad.json", PROPORTIONAL))]);
    assert_eq!(r.code, 1);
    let j = r.json();
    assert_eq!(j["status"], "fail");
    assert_eq!(j["failures"][0]["vertex"], serde_json::json!(["F1", "F2"]));
}

#[test]
fn malformed_inputs_exit_two() {
    let f = Files::new();
    for (name, text) in [
        ("junk.json", "{not json"),
        ("dup.json", &CP2.replace(r#""F3": [-1, -1]"#, r#""F1": [-1, -1]"#)),
        ("short.json", &CP2.replace("[-1, -1]", "[-1]")),
        ("extra.json", &CP2.replace(r#""dim": 2"#, r#""dim": 2, "name": "x""#)),
    ] {
        let r = qtorb(&["validate", path(&f.write(name, text))]);
        assert_eq!(r.code, 2, "{name}: {}", r.stdout);
        assert_eq!(r.json()["status"], "malformed");
    }
    let r = qtorb(&["validate", "/nonexistent/model.json"]);
    assert_eq!(r.code, 2);
    let cp2 = f.write("cp2.json", CP2);
    assert_eq!(qtorb(&["decompose", path(&cp2), "--lambda0", "1,x"]).code, 2);
    assert_eq!(qtorb(&["decompose", path(&cp2), "--lambda0", "1,1,1"]).code, 2);
    assert_eq!(qtorb(&["equiv", path(&cp2), path(&cp2), "--bound", "0"]).code, 2);
}

#[test]
fn decompose_cp1_verifies() {
    let f = Files::new();
    let r = qtorb(&["decompose", path(&f.write("cp1.json", CP1)), "--lambda0", "1"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let j = r.json();
    let comps = j["relation"]["components"].as_array().unwrap();
    assert_eq!(comps.len(), 3);
    let signs: Vec<i64> = comps.iter().map(|c| c["sign"].as_i64().unwrap()).collect();
    assert_eq!(signs, [-1, 1, 1]);
    assert_eq!(j["relation"]["verification"]["status"], "pass");
    assert_eq!(j["lambda0"], serde_json::json!([1]));
}

#[test]
fn decompose_cp2_with_lambda0() {
    let f = Files::new();
    let input = f.write("cp2.json", CP2);
    let r = qtorb(&["decompose", path(&input), "--lambda0", "1,2"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let j = r.json();
    let comps = j["relation"]["components"].as_array().unwrap();
    assert_eq!(comps.len(), 4);
    for c in &comps[1..] {
        assert_eq!(c["model"]["facets"].as_array().unwrap().len(), 3);
    }
    // (1,2) leaves singular simplices, so only structure is checked.
    assert_eq!(j["relation"]["verification"]["status"], "unverifiable");

    let r = qtorb(&["decompose", path(&input), "--lambda0", "1,2", "--no-verify"]);
    assert!(r.json()["relation"].get("verification").is_none());

    let auto = qtorb(&["decompose", path(&input)]);
    assert_eq!(auto.json()["lambda0"], serde_json::json!([-1, 1]));
}

#[test]
fn decompose_rejects_lambda0_on_an_edge_span() {
    let f = Files::new();
    let r = qtorb(&["decompose", path(&f.write("cp2.json", CP2)), "--lambda0", "1,0"]);
    assert_eq!(r.code, 1);
    let j = r.json();
    assert_eq!(j["error"]["kind"], "lambda0_rejected");
    assert_eq!(j["error"]["witness"]["edge"], serde_json::json!(["F1"]));
}

#[test]
fn relation_on_hexagon_and_prism() {
    let f = Files::new();
    let r = qtorb(&["relation", path(&f.write("hex.json", HEXAGON))]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert_eq!(r.json()["relation"]["components"].as_array().unwrap().len(), 3);

    let r = qtorb(&["relation", path(&f.write("prism.json", PRISM))]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let j = r.json();
    let comps = j["relation"]["components"].as_array().unwrap();
    assert_eq!(comps.len(), 2);
    assert_eq!(comps[0]["facet"], "TOP");
    assert_eq!(comps[0]["labels"], comps[1]["labels"]);
    assert_eq!(j["relation"]["verification"]["status"], "pass");

    let r = qtorb(&["relation", path(&f.write("cp2.json", CP2))]);
    assert_eq!(r.code, 2);
}

#[test]
fn vertexcut_on_triangle() {
    let f = Files::new();
    let r = qtorb(&["vertexcut", path(&f.write("tri.json", TRIANGLE))]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let j = r.json();
    assert_eq!(j["relation"]["construction"], "vertex_cut");
    let mut labels: Vec<Vec<i64>> = j["relation"]["components"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| {
            let mut ls: Vec<i64> = c["labels"]
                .as_object()
                .unwrap()
                .values()
                .map(|v| v[0].as_i64().unwrap())
                .collect();
            ls.sort();
            ls
        })
        .collect();
    labels.sort();
    assert_eq!(labels, vec![vec![1, 1], vec![1, 2], vec![1, 2]]);

    let bad = TRIANGLE.replace(r#""F2": [1]"#, r#""F2": [0]"#);
    let r = qtorb(&["vertexcut", path(&f.write("bad.json", &bad))]);
    assert_eq!(r.code, 1, "{}", r.stdout);
    assert!(r.json()["error"]["witness"]["face"].is_array());
}

#[test]
fn chern_numbers_of_cp2() {
    let f = Files::new();
    let r = qtorb(&["chern", path(&f.write("cp2.json", CP2))]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let j = r.json();
    let values: Vec<(Value, Value)> = j["numbers"]
        .as_array()
        .unwrap()
        .iter()
        .map(|n| (n["partition"].clone(), n["value"].clone()))
        .collect();
    assert_eq!(
        values,
        vec![
            (serde_json::json!([2]), 3.into()),
            (serde_json::json!([1, 1]), 9.into())
        ]
    );
    let r = qtorb(&["chern", path(&f.write("orb.json", ORBIFOLD))]);
    assert_eq!(r.code, 1);
    assert_eq!(r.json()["error"]["kind"], "not_smooth");
}

#[test]
fn equiv_finds_sign_change() {
    let f = Files::new();
    let a = f.write("a.json", CP1);
    let b = f.write("b.json", CP1_SWAPPED);
    let r = qtorb(&["equiv", path(&a), path(&b), "--bound", "1"]);
    assert_eq!(r.code, 0);
    let j = r.json();
    assert_eq!(j["matrix"], serde_json::json!([[-1]]));
    assert_eq!(j["inputs"].as_array().unwrap().len(), 2);

    let c = f.write("c.json", &CP1.replace(r#""F2": [-1]"#, r#""F2": [2]"#));
    let r = qtorb(&["equiv", path(&a), path(&c)]);
    assert_eq!(r.code, 1);
    assert_eq!(r.json()["found"], false);

    let cp2 = f.write("cp2.json", CP2);
    assert_eq!(qtorb(&["equiv", path(&a), path(&cp2)]).code, 1);
}

#[test]
fn reports_are_deterministic_and_text_renders() {
    let f = Files::new();
    let input = f.write("cp2.json", CP2);
    let a = qtorb(&["decompose", path(&input)]);
    let b = qtorb(&["decompose", path(&input)]);
    assert_eq!(a.stdout, b.stdout);

    let out = f.0.path().join("report.json");
    let r = qtorb(&["decompose", path(&input), "--out", path(&out)]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.is_empty());
    assert_eq!(fs::read_to_string(&out).unwrap(), a.stdout);

    let t = qtorb(&["validate", path(&input), "--format", "text"]);
    assert_eq!(t.code, 0);
    assert!(t.stdout.lines().any(|l| l == "smooth: true"), "{}", t.stdout);
    assert!(t.stdout.lines().any(|l| l == "status: pass"));
}
