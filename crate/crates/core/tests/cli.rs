use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn run(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_padic-entropy"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json_out(args: &[&str], stdin: &str) -> Value {
    let out = run(args, stdin);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

const MIXED: &str = r#"{"command": "entropy", "group": {"p": 3, "n1": 1, "n2": 1},
    "endo": {"zp<-zp": [["4/5"]], "qp<-zp": [["7/2"]], "qp<-qp": [["1/9"]]}}"#;

#[test]
fn entropy_of_mixed_endomorphism() {
    let v = json_out(&["entropy", "-f", "-"], MIXED);
    assert_eq!(v["agreement"], true);
    let results = v["results"].as_array().unwrap();
    assert_eq!(results.len(), 2);
    for r in results {
        assert_eq!(r["value"]["3"], 2);
        assert!(r["provenance"].as_str().unwrap().len() > 10);
    }
}

#[test]
fn reading_from_a_file() {
    let dir = std::env::temp_dir().join(format!("padic-entropy-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("request.json");
    std::fs::write(&path, MIXED).unwrap();
    let v = json_out(&["entropy", "-f", path.to_str().unwrap()], "");
    assert_eq!(v["results"][0]["value"]["3"], 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn newton_segments() {
    let v = json_out(&["newton", "--poly", "X^2-10/3X+1", "--p", "3"], "");
    let segs = v["results"][0]["value"]["segments"].as_array().unwrap();
    let pairs: Vec<(String, u64)> = segs
        .iter()
        .map(|s| (s["slope"].as_str().unwrap().to_string(), s["length"].as_u64().unwrap()))
        .collect();
    assert_eq!(pairs, vec![("-1/1".to_string(), 1), ("1/1".to_string(), 1)]);
}

#[test]
fn classify_without_qp_is_e0() {
    let v = json_out(&["classify", "-f", "-"], r#"{"p": 5, "n1": 2, "n3": 1, "torsion": [2]}"#);
    assert_eq!(v["results"][0]["value"], "E0");
    assert_eq!(v["results"][1]["value"], 4);
}

#[test]
fn scale_report() {
    let v = json_out(&["scale", "-f", "-", "--kmin", "-2", "--kmax", "2"], r#"{"p": 2, "matrix": [["1/4", "1"], ["0", "3"]]}"#);
    assert_eq!(v["agreement"], true);
    let r = v["results"].as_array().unwrap();
    assert_eq!(r[0]["value"]["exact"], "4");
    assert_eq!(r[1]["value"]["exact"], "4");
    assert_eq!(r[2]["value"]["best_index"], "4");
}

#[test]
fn check_at_report() {
    let doc = r#"{"p": 3, "a1": [["1/3"]], "b": [["5"], ["1"]], "a2": [["2", "0"], ["1", "1/9"]]}"#;
    let v = json_out(&["check-at", "-f", "-"], doc);
    assert_eq!(v["agreement"], true);
    assert_eq!(v["results"][0]["value"]["3"], 3);
}

#[test]
fn heisenberg_witness_and_zp_evidence() {
    let v = json_out(&["heisenberg", "--ring", "qp", "--s", "1/3", "--t", "1", "--p", "3", "--oracle"], "");
    assert_eq!(v["agreement"], true);
    let totals: Vec<&Value> = v["results"].as_array().unwrap().iter().filter(|e| e["quantity"] == "entropy").collect();
    assert_eq!(totals.len(), 2);
    assert!(totals.iter().all(|e| e["value"]["3"] == 2));

    let v = json_out(&["heisenberg", "--ring", "zp", "--p", "5"], "");
    let class = &v["results"][0]["value"];
    assert_eq!(class["classification"], "E0");
    assert!(!class["evidence"].as_array().unwrap().is_empty());
}

#[test]
fn text_output_is_stable() {
    let a = run(&["entropy", "-f", "-", "--format", "text"], MIXED);
    let b = run(&["entropy", "-f", "-", "--format", "text"], MIXED);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains("2·log 3"));
    assert!(text.contains("agreement: yes"));
    let j1 = run(&["entropy", "-f", "-"], MIXED);
    let j2 = run(&["entropy", "-f", "-"], MIXED);
    assert_eq!(j1.stdout, j2.stdout);
}

#[test]
fn exit_codes() {
    // malformed rational
    let out = run(&["entropy", "-f", "-"], r#"{"p": 3, "matrix": [["1/0"]]}"#);
    assert_eq!(out.status.code(), Some(2));
    // unknown prime key
    let out = run(&["entropy", "-f", "-"], r#"{"components": {"6": {"p": 6}}}"#);
    assert_eq!(out.status.code(), Some(2));
    // forced-zero block
    let out = run(&["entropy", "-f", "-"], r#"{"group": {"p": 3, "n1": 1, "n2": 1}, "endo": {"zp<-qp": [["1"]]}}"#);
    assert_eq!(out.status.code(), Some(3));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "validation");
    assert_eq!(err["violations"][0]["target"], "zp");
    assert_eq!(err["violations"][0]["source"], "qp");
    // transient of length one does not fit in a cap equal to the window
    let out = run(&["oracle", "-f", "-", "--cap", "5"], r#"{"p": 2, "matrix": [["1", "1/8"], ["0", "1"]]}"#);
    assert_eq!(out.status.code(), Some(4));
    let out = run(&["oracle", "-f", "-", "--cap", "6"], r#"{"p": 2, "matrix": [["1", "1/8"], ["0", "1"]]}"#);
    assert_eq!(out.status.code(), Some(0));
}
