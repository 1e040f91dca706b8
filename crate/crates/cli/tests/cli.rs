use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const GAMMA0: &str = r#"{"vertices":["a","b","c","d"],"edges":[["a","b"],["b","c"]]}"#;
// Positions of the three example partitions in the canonical list for GAMMA0.
const Q: &str = "Q3";
const W: &str = "Q20";

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn raag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_raag")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = raag(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    raag(args).status.code().unwrap()
}

fn gamma0(dir: &TempDir) -> String {
    write(dir, "g0.json", GAMMA0).to_str().unwrap().to_string()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn graph_info_reports_the_dominant_set() {
    let dir = TempDir::new().unwrap();
    let g = gamma0(&dir);
    let text = ok(&["graph-info", "--input", &g]);
    assert!(text.contains("twist-dominant: {b}"));
    assert!(text.contains("order: d a c b"));
    let json: serde_json::Value = serde_json::from_str(&ok(&["graph-info", "--input", &g, "--format", "json"])).unwrap();
    assert_eq!(json["twistDominant"], serde_json::json!(["b"]));
    assert_eq!(json["foldClasses"], serde_json::json!([["d"], ["a", "c"], ["b"]]));
}

#[test]
fn empty_graph_and_bad_files() {
    let dir = TempDir::new().unwrap();
    let empty = write(&dir, "e.json", r#"{"vertices":[],"edges":[]}"#);
    assert_eq!(code(&["graph-info", "--input", s(&empty)]), 0);
    let looped = write(&dir, "l.json", r#"{"vertices":["a"],"edges":[["a","a"]]}"#);
    assert_eq!(code(&["graph-info", "--input", s(&looped)]), 2);
    let dup = write(&dir, "d.json", r#"{"vertices":["a","b"],"edges":[["a","b"],["b","a"]]}"#);
    assert_eq!(code(&["graph-info", "--input", s(&dup)]), 2);
    let junk = write(&dir, "j.json", "not json");
    assert_eq!(code(&["partitions", "--input", s(&junk)]), 2);
    assert_eq!(code(&["graph-info", "--input", s(&dir.path().join("missing.json"))]), 2);
}

#[test]
fn partition_listing() {
    let dir = TempDir::new().unwrap();
    let two = write(&dir, "two.json", r#"{"vertices":["a","b"],"edges":[]}"#);
    assert!(ok(&["partitions", "--input", s(&two)]).starts_with("partitions=2\n"));
    let k3 = write(&dir, "k3.json", r#"{"vertices":["a","b","c"],"edges":[["a","b"],["b","c"],["a","c"]]}"#);
    assert!(ok(&["partitions", "--input", s(&k3)]).starts_with("partitions=0\n"));

    let g = gamma0(&dir);
    let text = ok(&["partitions", "--input", &g]);
    assert!(text.contains("\nQ3 ({a,d}|{a-,c,c-,d-}|{b,b-}) sing={a,d} max={a}"));
    assert!(text.contains("\nQ4 ({a,c,d}|{a-,c-,d-}|{b,b-})"));
    assert!(text.contains("\nQ20 ({b,d}|{b-,d-}|{a,a-,c,c-}) sing={b,d} max={b}"));
    let json: serde_json::Value = serde_json::from_str(&ok(&["partitions", "--input", &g, "--format", "json"])).unwrap();
    assert_eq!(json["partitions"].as_array().unwrap().len(), 22);
    assert_eq!(json["compatible"][3][20], true);
}

#[test]
fn blowup_counts_and_exports() {
    let dir = TempDir::new().unwrap();
    let g = gamma0(&dir);
    assert_eq!(ok(&["blowup", "--input", &g, "--partitions", Q]), "vertices=2 edges=6 squares=3 euler=-1\n");
    assert_eq!(ok(&["blowup", "--input", &g, "--partitions", "3"]), "vertices=2 edges=6 squares=3 euler=-1\n");
    assert!(ok(&["blowup", "--input", &g, "--partitions", &format!("{W},{Q}")]).starts_with("vertices=4 "));
    assert_eq!(ok(&["blowup", "--input", &g]), "vertices=1 edges=4 squares=2 euler=-1\n");

    let json: serde_json::Value =
        serde_json::from_str(&ok(&["blowup", "--input", &g, "--partitions", Q, "--format", "json"])).unwrap();
    assert_eq!(json["cubeCounts"], serde_json::json!([2, 6, 3]));
    assert_eq!(json["euler"], -1);
    let dot = ok(&["blowup", "--input", &g, "--partitions", Q, "--format", "dot"]);
    assert!(dot.starts_with("digraph blowup {"));
    assert!(dot.contains("dir=none"));
}

#[test]
fn inline_partitions_are_validated() {
    let dir = TempDir::new().unwrap();
    let g = gamma0(&dir);
    let q = r#"[{"sideA":[["a","+"],["d","+"]],"sideB":[["a","-"],["c","+"],["c","-"],["d","-"]],"link":[["b","+"],["b","-"]]}]"#;
    assert_eq!(ok(&["blowup", "--input", &g, "--partitions", q]), "vertices=2 edges=6 squares=3 euler=-1\n");
    // b must not be split by a partition based at a
    let bad = r#"[{"sideA":[["a","+"],["b","+"]],"sideB":[["a","-"],["b","-"],["c","+"],["c","-"],["d","+"],["d","-"]],"link":[]}]"#;
    assert_eq!(code(&["blowup", "--input", &g, "--partitions", bad]), 3);
    assert_eq!(code(&["blowup", "--input", &g, "--partitions", "[{"]), 2);
}

#[test]
fn selector_errors() {
    let dir = TempDir::new().unwrap();
    let g = gamma0(&dir);
    let out = raag(&["blowup", "--input", &g, "--partitions", "Q3,Q0"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("Q3") && err.contains("Q0"), "{err}");
    assert_eq!(code(&["blowup", "--input", &g, "--partitions", "99"]), 3);
    assert_eq!(code(&["blowup", "--input", &g, "--partitions", "Q3,Q3"]), 3);
    assert_eq!(code(&["blowup", "--input", &g, "--partitions", "Qx"]), 2);
    assert_eq!(code(&["blowup", "--input", &g, "--partitions", "Q3,Q20", "--cap", "3"]), 4);
    assert_eq!(code(&["partitions", "--input", &g, "--cap", "5"]), 4);
    assert_eq!(code(&["blowup", "--input", &g, "--cap", "0"]), 2);
    assert_eq!(code(&["classify", "--input", &g, "--format", "dot"]), 2);
}

#[test]
fn collapse_reports_the_smaller_blowup() {
    let dir = TempDir::new().unwrap();
    let g = gamma0(&dir);
    let pair = format!("{W},{Q}");
    let text = ok(&["collapse", "--input", &g, "--partitions", &pair, "--member", "1"]);
    let alone = ok(&["blowup", "--input", &g, "--partitions", W]);
    assert_eq!(text, format!("collapsed Q1: {alone}isomorphic=true\n"));
    assert_eq!(code(&["collapse", "--input", &g, "--partitions", &pair, "--member", "2"]), 3);
}

#[test]
fn classification_table() {
    let dir = TempDir::new().unwrap();
    let g = gamma0(&dir);
    let text = ok(&["classify", "--input", &g, "--partitions", Q]);
    assert!(text.contains("Q0 TwistMinimal foldClass={a,Q0,c} cyclic=false\n"));
    assert!(text.contains("b TwistDominant foldClass={b} cyclic=true\n"));
    let sq = write(&dir, "sq.json", r#"{"vertices":["a","b","c","d"],"edges":[["a","b"],["b","c"],["c","d"],["d","a"]]}"#);
    let json: serde_json::Value = serde_json::from_str(&ok(&["classify", "--input", s(&sq), "--format", "json"])).unwrap();
    for row in json.as_array().unwrap() {
        assert_eq!(row["class"], "TwistMinimal");
    }
}

#[test]
fn fiber_dimension() {
    let dir = TempDir::new().unwrap();
    let g = gamma0(&dir);
    let text = ok(&["fiber", "--input", &g, "--partitions", Q]);
    assert!(text.starts_with("fiberDim=1\n"));
    assert!(text.contains("basis: [-1, 1, 0]"));
    assert!(ok(&["fiber", "--input", &g]).starts_with("fiberDim=0\n"));
    let json: serde_json::Value =
        serde_json::from_str(&ok(&["fiber", "--input", &g, "--partitions", Q, "--format", "json"])).unwrap();
    assert_eq!(json["matrix"], serde_json::json!([[1, 1, 0], [0, 0, 1]]));
    assert_eq!(json["kernelBasis"], serde_json::json!([[-1.0, 1.0, 0.0]]));
}

#[test]
fn straightening_from_a_metric_file() {
    let dir = TempDir::new().unwrap();
    let g = gamma0(&dir);
    let flat = ok(&["straighten", "--input", &g, "--partitions", Q, "--samples", "3"]);
    let lines: Vec<&str> = flat.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0].split_once(' ').unwrap().1, lines[2].split_once(' ').unwrap().1);

    let metric = write(
        &dir,
        "m.json",
        r#"{"widths":{"a":1,"b":1,"c":1,"d":1,"Q0":0.5},"angles":[{"a":"a","b":"b","radians":1.0},{"a":"c","b":"b","radians":1.5707963267948966},{"a":"Q0","b":"b","radians":1.0}]}"#,
    );
    let out = ok(&["straighten", "--input", &g, "--partitions", Q, "--metric", s(&metric), "--format", "json"]);
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    let samples = json["samples"].as_array().unwrap();
    assert_eq!(samples.len(), 5);
    let first = &samples[0]["metric"]["angles"][0]["radians"];
    assert!((first.as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
    assert_eq!(samples[4]["metric"]["angles"][0]["radians"], 1.0);

    let unknown = write(&dir, "u.json", r#"{"widths":{"zz":1},"angles":[]}"#);
    assert_eq!(code(&["straighten", "--input", &g, "--metric", s(&unknown)]), 2);
    let degenerate = write(
        &dir,
        "deg.json",
        r#"{"widths":{"a":1,"b":1,"c":1,"d":1},"angles":[{"a":"a","b":"b","radians":0.0},{"a":"c","b":"b","radians":1.5707963267948966}]}"#,
    );
    assert_eq!(code(&["straighten", "--input", &g, "--metric", s(&degenerate)]), 3);
}

#[test]
fn output_file_and_determinism() {
    let dir = TempDir::new().unwrap();
    let g = gamma0(&dir);
    let out = dir.path().join("b.json");
    let pair = format!("{W},{Q}");
    ok(&["blowup", "--input", &g, "--partitions", &pair, "--format", "json", "--out", s(&out)]);
    let first = std::fs::read(&out).unwrap();
    let again = ok(&["blowup", "--input", &g, "--partitions", &pair, "--format", "json"]);
    assert_eq!(first, again.as_bytes());
    for cmd in ["graph-info", "partitions"] {
        assert_eq!(ok(&[cmd, "--input", &g, "--format", "json"]), ok(&[cmd, "--input", &g, "--format", "json"]));
    }
    for cmd in ["classify", "fiber", "straighten"] {
        assert_eq!(
            ok(&[cmd, "--input", &g, "--partitions", &pair, "--format", "json"]),
            ok(&[cmd, "--input", &g, "--partitions", &pair, "--format", "json"])
        );
    }
}
