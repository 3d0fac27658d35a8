use dptree::cli::run;
use dptree::{canonical_code, invariant_of, DoublePointTree};

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn dptree(args: &[&str], stdin: &str) -> Output {
    let mut argv = vec!["dptree"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut stdin.as_bytes(), &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn tree(text: &str) -> DoublePointTree {
    serde_json::from_str(text.trim()).unwrap()
}

#[test]
fn invariant_of_j() {
    let o = dptree(&["invariant", &data("j.json")], "");
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(o.stdout.trim(), r#"{"coefficients":{"3":1}}"#);
}

#[test]
fn invariant_from_stdin() {
    let j = std::fs::read_to_string(data("neg_j.json")).unwrap();
    let o = dptree(&["invariant", "-"], &j);
    assert_eq!(o.stdout.trim(), r#"{"coefficients":{"-3":1}}"#);
}

#[test]
fn validate_reports_unpaired_edge() {
    let o = dptree(&["validate", &data("twovertex.json")], "");
    assert_eq!(o.code, 2);
    assert!(o.stdout.contains("unpaired"), "{}", o.stdout);
    let o = dptree(&["validate", &data("fig9d.json")], "");
    assert_eq!(o.code, 0);
}

#[test]
fn input_errors_exit_1() {
    assert_eq!(dptree(&["invariant", &data("missing.json")], "").code, 1);
    assert_eq!(dptree(&["invariant", "-"], "{not json").code, 1);
    assert_eq!(dptree(&["frobnicate"], "").code, 1);
    assert_eq!(dptree(&["enum", "--max-vertices", "3"], "").code, 1);
    let o = dptree(&["--help"], "");
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("realize"));
}

#[test]
fn reach_e_to_j_is_certified_unreachable() {
    let o = dptree(&["reach", &data("e.json"), &data("j.json")], "");
    assert_eq!(o.code, 0);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["status"], "CertifiedUnreachable");
    assert_eq!(v["source_invariant"]["coefficients"]["1"], 1);
    assert_eq!(v["target_invariant"]["coefficients"]["3"], 1);
}

#[test]
fn negate_and_sum_round_trip() {
    let o = dptree(&["negate", &data("neg_j.json")], "");
    assert_eq!(o.code, 0);
    let j = tree(&std::fs::read_to_string(data("j.json")).unwrap());
    assert_eq!(canonical_code(&tree(&o.stdout)).unwrap(), canonical_code(&j).unwrap());

    let o = dptree(&["sum", &data("j.json"), "w1", &data("j.json"), "w2"], "");
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(invariant_of(&tree(&o.stdout)).unwrap().to_string(), "1:-1 3:2");
    // j's centre has delta 3.
    assert_eq!(dptree(&["sum", &data("j.json"), "v", &data("e.json"), "v"], "").code, 2);
}

#[test]
fn apply_birth_then_list_moves() {
    let birth = r#"{"type":"EBirth","v1":"v","v2":"v","d1":3,"d2":3}"#;
    let o = dptree(&["apply", &data("e.json"), birth], "");
    assert_eq!(o.code, 0, "{}", o.stderr);
    let t = tree(&o.stdout);
    assert_eq!(t.vertex_count(), 3);
    assert_eq!(invariant_of(&t).unwrap().to_string(), "1:1");

    let o = dptree(&["moves", &data("e.json")], "");
    let moves: Vec<serde_json::Value> = serde_json::from_str(&o.stdout).unwrap();
    assert!(moves.iter().any(|m| m["type"] == "EBirth"));

    let unknown = r#"{"type":"EDeath","pair":["x","y"]}"#;
    assert_eq!(dptree(&["apply", &data("e.json"), unknown], "").code, 1);
    // r2 ends at w2, which is not a leaf.
    let death = r#"{"type":"EDeath","pair":["r1","r2"]}"#;
    let o = dptree(&["apply", &data("fig9a.json"), death], "");
    assert_eq!(o.code, 2, "{}", o.stderr);
}

#[test]
fn enum_emits_one_tree_per_line() {
    let o = dptree(&["enum", "--max-vertices", "3", "--delta-bound", "3"], "");
    assert_eq!(o.code, 0);
    let lines: Vec<&str> = o.stdout.lines().collect();
    assert_eq!(lines.len(), 12);
    for l in lines {
        let v: serde_json::Value = serde_json::from_str(l).unwrap();
        let t: DoublePointTree = serde_json::from_value(v["tree"].clone()).unwrap();
        assert_eq!(canonical_code(&t).unwrap().to_hex(), v["code"]);
    }
}

#[test]
fn realize_echoes_invariant() {
    let o = dptree(&["realize", "--coeff", "5:1", "--coeff", "-3:1", "--coeff", "1:-1"], "");
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(invariant_of(&tree(&o.stdout)).unwrap().to_string(), "-3:1 1:-1 5:1");
    assert!(o.stderr.contains("-3:1 1:-1 5:1"));
    assert_eq!(dptree(&["realize", "--coeff", "3:1", "--coeff", "5:1"], "").code, 2);
    assert_eq!(dptree(&["realize", "--coeff", "2:1"], "").code, 2);
}

#[test]
fn from_curve_half_circle() {
    let pts: Vec<[f64; 2]> = (0..=64)
        .map(|i| {
            let t = std::f64::consts::PI * i as f64 / 64.0;
            [if i == 64 { 0.0 } else { t.sin() }, t.cos()]
        })
        .collect();
    let curve = serde_json::json!({ "points": pts }).to_string();
    let o = dptree(&["from-curve", "-"], &curve);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(invariant_of(&tree(&o.stdout)).unwrap().to_string(), "1:1");
    let o = dptree(&["from-curve", "--flip-orientation", "-"], &curve);
    assert_eq!(invariant_of(&tree(&o.stdout)).unwrap().to_string(), "-1:1");
    assert_eq!(dptree(&["from-curve", "-"], r#"{"points":[[1,0],[2,0]]}"#).code, 1);
}

#[test]
fn dot_colours_pairs() {
    let o = dptree(&["dot", &data("fig9d.json")], "");
    assert_eq!(o.code, 0);
    assert!(o.stdout.starts_with("digraph"));
    let colours: std::collections::HashSet<&str> = o.stdout.lines().filter_map(|l| l.split("color=").nth(1)).collect();
    assert_eq!(colours.len(), 3);
    let o = dptree(&["invariant", "--format", "dot", &data("j.json")], "");
    assert_eq!(o.code, 0);
}
