use std::path::Path;
use std::process::Command;

use serde_json::{json, Value};
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn selfsim(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_selfsim"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn json_of(args: &[&str]) -> Value {
    let r = selfsim(args);
    assert_eq!(r.code, 0, "{args:?}: {}", r.stderr);
    serde_json::from_str(&r.stdout).unwrap()
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p.to_str().unwrap().to_string()
}

fn proper(k: usize, labels: &[&str]) -> Value {
    let colors: Vec<String> = (0..k).map(|i| i.to_string()).collect();
    let mut triples = Vec::new();
    for a in &colors {
        for b in &colors {
            if a != b {
                for l in labels {
                    triples.push(json!([a, l, b]));
                }
            }
        }
    }
    json!({"colors": colors, "labels": labels, "triples": triples})
}

#[test]
fn pcf_odometer() {
    let v = json_of(&["pcf", "gallery:odometer", "--json"]);
    assert_eq!(v["bounded"], json!(true));
    assert_eq!(v["postcritical"], json!(["^inf 0", "^inf 1"]));
    assert_eq!(v["caps"], json!({"max_extent": 6, "max_iter": 10000, "max_levels": 64}));
}

#[test]
fn pcf_long_range() {
    let v = json_of(&["pcf", "gallery:longrange"]);
    assert_eq!(v["bounded"], json!(false));
    assert_eq!(v["degree"], json!(1));
}

#[test]
fn nucleus_and_treewidth() {
    let v = json_of(&["nucleus", "gallery:hanoi"]);
    assert_eq!(v["elements"], json!(["1", "a", "b", "c"]));
    let v = json_of(&["treewidth", "gallery:hanoi"]);
    assert_eq!(v["bound"], json!(9));
    let v = json_of(&["treedecomp", "gallery:odometer", "--level", "3"]);
    assert!(v["width"].as_u64().unwrap() < 4);
    let v = json_of(&["ancestor", "gallery:hanoi"]);
    assert_eq!(v["axioms_hold"], json!(true));
    let v = json_of(&["postcritical", "gallery:odometer"]);
    assert_eq!(v["paths"].as_array().unwrap().len(), 2);
}

#[test]
fn decide_from_file() {
    let dir = TempDir::new().unwrap();
    let three = write(dir.path(), "three.json", &proper(3, &["a", "b", "c"]));
    let two = write(dir.path(), "two.json", &proper(2, &["a", "b", "c"]));
    let v = json_of(&["decide", "gallery:hanoi", &three, "--ray", r#"{"preperiod":[],"period":["0","1"]}"#]);
    assert_eq!(v["verdict"], json!("tileable"));
    let v = json_of(&["decide", "gallery:hanoi", &two, "--ray", "(01)"]);
    assert_eq!(v["verdict"], json!("not_tileable"));
    let v = json_of(&["decide", "gallery:hanoi", &three, "--ray", r#"{"preperiod":[],"period":["0"]}"#]);
    assert!(v["verdict"].is_string());
}

#[test]
fn schreier_formats() {
    let r = selfsim(&["schreier", "gallery:hanoi", "--level", "2", "--kind", "tile", "--format", "dot"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.starts_with("digraph") || r.stdout.starts_with("graph"));
    let v = json_of(&["schreier", "gallery:odometer", "--level", "2", "--gens", "t,t^-1"]);
    assert_eq!(v["labels"], json!(["t", "t^-1"]));
    assert_eq!(v["edges"].as_array().unwrap().len(), 8);
    let v = json_of(&["ball", "gallery:longrange", "--center", "(0)", "--radius", "1"]);
    assert_eq!(v["vertices"].as_array().unwrap().len(), 3);
}

#[test]
fn tile_with_pins() {
    let dir = TempDir::new().unwrap();
    let g = json_of(&["schreier", "gallery:hanoi", "--level", "2", "--kind", "tile"]);
    let graph = write(dir.path(), "g.json", &g);
    let ts = write(dir.path(), "ts.json", &proper(3, &["a", "b", "c"]));
    let v = json_of(&["tile", &graph, &ts, "--pins", r#"{"00":"2"}"#]);
    assert_eq!(v["solution"]["00"], json!("2"));
    let v = json_of(&["tile", &graph, &ts, "--limit", "1000"]);
    // Proper 3-colourings of three triangles joined in a triangle.
    assert_eq!(v["count"], json!(v["solutions"].as_array().unwrap().len()));
    assert!(v["count"].as_u64().unwrap() > 0);
    let two = write(dir.path(), "two.json", &proper(2, &["a", "b", "c"]));
    let v = json_of(&["tile", &graph, &two]);
    assert_eq!(v["solution"], Value::Null);
}

#[test]
fn tileset_constructions() {
    let dir = TempDir::new().unwrap();
    let wang = write(
        dir.path(),
        "w.json",
        &json!({"tiles": [{"n": "a", "e": "x", "s": "a", "w": "x"}, {"name": "B", "n": "b", "e": "x", "s": "b", "w": "x"}]}),
    );
    let v = json_of(&["wang", &wang]);
    assert_eq!(v["colors"], json!(["w0", "B"]));
    let v = json_of(&["compose-grid", "lr_octant", &wang]);
    assert!(v["colors"].as_array().unwrap().len() > 2);
    let v = json_of(&["compose-grid", "hgraph_strips", &wang]);
    assert_eq!(v["colors"].as_array().unwrap().len(), 26);
    let v = json_of(&["localmark", "a", "--others", "b,c"]);
    assert_eq!(v["marked"], json!(["0"]));
    let pats = write(
        dir.path(),
        "p.json",
        &json!({"colors": ["x", "y"], "radius": 1, "patterns": [{"1": "x", "a": "x"}]}),
    );
    let v = json_of(&["compile-patterns", &pats]);
    assert_eq!(v["hull"], json!(["1", "a"]));
    let mut main = proper(2, &["t"]);
    main["seed"] = json!("0");
    let main = write(dir.path(), "main.json", &main);
    let ssu = write(dir.path(), "ssu.json", &proper(2, &["t"]));
    let v = json_of(&["compose-seeded", &main, &ssu, "--marked", "1"]);
    assert_eq!(v["colors"].as_array().unwrap().len(), 3);
}

#[test]
fn substitutions() {
    let v = json_of(&["substitution", "classify", "gallery:h"]);
    assert_eq!(v["verdict"], json!("isthmus"));
    let v = json_of(&["substitution", "convert", "gallery:gasket"]);
    assert_eq!(v["states"].as_array().unwrap().len(), 9);
    let dir = TempDir::new().unwrap();
    let s = write(dir.path(), "s.json", &json!({"dims": 2, "box": [2, 2], "black": [[0, 0], [1, 0], [1, 1]]}));
    assert_eq!(json_of(&["substitution", "classify", &s])["verdict"], json!("bounded_connectivity"));
    let bad = write(dir.path(), "bad.json", &json!({"dims": 2, "box": [3, 3], "black": [[0, 0], [2, 2]]}));
    let r = selfsim(&["substitution", "classify", &bad]);
    assert_eq!(r.code, 2);
}

#[test]
fn verify_and_caps() {
    let v = json_of(&["verify", "lr_grid", "--extent", "5"]);
    assert_eq!(v["pass"], json!(true));
    let r = selfsim(&["verify", "lr_grid", "--extent", "7"]);
    assert_eq!(r.code, 3);
    let err: Value = serde_json::from_str(r.stderr.trim()).unwrap();
    assert_eq!(err["error"], json!("extent_too_large"));
    let v = json_of(&["verify", "lr_sunny", "--extent", "7", "--max-extent", "8"]);
    assert_eq!(v["caps"]["max_extent"], json!(8));
    let r = selfsim(&["nucleus", "gallery:longrange", "--max-iter", "20"]);
    assert_eq!(r.code, 3);
    let err: Value = serde_json::from_str(r.stderr.trim()).unwrap();
    assert_eq!(err["error"], json!("not_contracting_up_to_bound"));
}

#[test]
fn input_errors() {
    let r = selfsim(&["nucleus", "gallery:nope"]);
    assert_eq!(r.code, 2);
    let err: Value = serde_json::from_str(r.stderr.trim()).unwrap();
    assert_eq!(err["error"], json!("unknown_name"));
    assert!(err["detail"].is_string());
    let r = selfsim(&["nucleus", "/no/such/file.json"]);
    assert_eq!(r.code, 2);
    let r = selfsim(&["ball", "gallery:hanoi", "--center", "0", "--radius", "1"]);
    assert_eq!(r.code, 2);
}

#[test]
fn gallery_round_trip() {
    let list = json_of(&["gallery", "list"]);
    let dir = TempDir::new().unwrap();
    for m in list["machines"].as_array().unwrap() {
        let m = m.as_str().unwrap();
        let mut v = json_of(&["gallery", "export", m]);
        v.as_object_mut().unwrap().remove("caps");
        let f = write(dir.path(), &format!("{m}.json"), &v);
        let a = selfsim(&["schreier", &f, "--level", "2"]).stdout;
        let b = selfsim(&["schreier", &format!("gallery:{m}"), "--level", "2"]).stdout;
        assert_eq!(a, b, "{m}");
    }
    for t in list["tilesets"].as_array().unwrap() {
        assert!(json_of(&["gallery", "export", t.as_str().unwrap()])["colors"].is_array());
    }
}

#[test]
fn help_for_every_subcommand() {
    for sub in [
        "nucleus", "pcf", "postcritical", "ancestor", "treewidth", "schreier", "ball", "treedecomp", "decide",
        "tile", "compile-patterns", "wang", "compose-seeded", "localmark", "substitution", "compose-grid", "verify",
        "gallery",
    ] {
        let r = selfsim(&[sub, "--help"]);
        assert_eq!(r.code, 0, "{sub}");
        assert!(r.stdout.contains("--json"), "{sub}");
    }
}

#[test]
fn compact_and_pretty_agree() {
    let a: Value = serde_json::from_str(&selfsim(&["verify", "lr_sunny", "--extent", "4", "--json"]).stdout).unwrap();
    let pretty = selfsim(&["verify", "lr_sunny", "--extent", "4"]).stdout;
    assert!(pretty.lines().count() > 1);
    assert_eq!(a, serde_json::from_str::<Value>(&pretty).unwrap());
    let one = selfsim(&["verify", "hgraph_horoball", "--extent", "4", "--threads", "1"]).stdout;
    let four = selfsim(&["verify", "hgraph_horoball", "--extent", "4", "--threads", "4"]).stdout;
    assert_eq!(one, four);
}
