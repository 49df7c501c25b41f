use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ample(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ample")).args(args).env_remove("AMPLE_BUDGET").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json_file(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn find_and_verify_witness() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.json");
    let w = w.to_str().unwrap();
    let out = ample(&["find-witness", "cuntz:2", "--set", "whole", "--k", "2", "--l", "1", "--depth", "1", "-o", w]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(json_file(Path::new(w))["schema"], "ample/witness/1");
    assert_eq!(code(&ample(&["verify-witness", w])), 0);
    assert_eq!(code(&ample(&["verify-cert", w])), 0);
    let iso = ample(&["isometries", w]);
    assert_eq!(code(&iso), 0);
    let rep: Value = serde_json::from_str(&stdout(&iso)).unwrap();
    assert_eq!(rep["f_isometry"], true);
    assert_eq!(code(&ample(&["isometries", w, "--matrix"])), 0);
}

#[test]
fn tampered_witness_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.json");
    let out = ample(&["find-witness", "cuntz:2", "--depth", "1", "-o", w.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let mut doc = json_file(&w);
    doc["rows"][1] = doc["rows"][0].clone();
    fs::write(&w, doc.to_string()).unwrap();
    let out = ample(&["verify-witness", w.to_str().unwrap(), "--human"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("condition (2)"), "{}", stdout(&out));
}

#[test]
fn rotation_state() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s.json");
    let out = ample(&["state", "rotation:3", "--depth", "0", "-o", s.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let doc = json_file(&s);
    let values = doc["values"].as_array().unwrap();
    assert_eq!(values.len(), 3);
    for v in values {
        assert_eq!(v["value"], serde_json::json!({"num": "1", "den": "3"}));
    }
    assert_eq!(code(&ample(&["verify-cert", s.to_str().unwrap()])), 0);
}

#[test]
fn farkas_certificates_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    let out = ample(&["state", "cuntz:2", "--depth", "1", "-o", f.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert_eq!(code(&ample(&["verify-cert", f.to_str().unwrap()])), 0);
    let mut doc = json_file(&f);
    doc["multipliers"][0] = serde_json::json!({"num": "0", "den": "1"});
    doc["multipliers"][1] = serde_json::json!({"num": "0", "den": "1"});
    fs::write(&f, doc.to_string()).unwrap();
    assert_eq!(code(&ample(&["verify-cert", f.to_str().unwrap()])), 1);
}

#[test]
fn type_certificates_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("c.json");
    let out = ample(&["type-eq", "cuntz:2", "--left", "whole", "--right", "1;2", "-o", c.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(code(&ample(&["verify-cert", c.to_str().unwrap()])), 0);
    let out = ample(&["type-eq", "pair:3", "--left", "0", "--right", "2", "--leq", "--depth", "2", "-o", c.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(json_file(&c)["schema"], "ample/leq-certificate/1");
    assert_eq!(code(&ample(&["verify-cert", c.to_str().unwrap()])), 0);
    let out = ample(&["type-eq", "rotation:3", "--left", "0,1", "--right", "2"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn reports_and_exit_codes() {
    let t = ample(&["tarski", "cuntz:2", "--depth", "1"]);
    assert_eq!(code(&t), 0);
    let rep: Value = serde_json::from_str(&stdout(&t)).unwrap();
    assert_eq!(rep["outcome"], "paradox");
    let t = ample(&["tarski", "odometer", "--depth", "1"]);
    let rep: Value = serde_json::from_str(&stdout(&t)).unwrap();
    assert_eq!(rep["outcome"], "state");
    let d = ample(&["dichotomy", "cuntz:2", "--depth", "1"]);
    assert_eq!(code(&d), 0);
    assert!(stdout(&d).contains("purely_infinite"));
    let d = ample(&["dichotomy", "pair:3", "--human"]);
    assert!(stdout(&d).starts_with("stably_finite"), "{}", stdout(&d));
    let o = ample(&["orbits", "pair:3"]);
    let rep: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rep["invariant_sets"].as_array().unwrap().len(), 2);
    assert_eq!(code(&ample(&["ideal-check", "pair:3"])), 0);
    assert_eq!(code(&ample(&["ideal-check", "rotation:3"])), 3);
    assert_eq!(code(&ample(&["ideal-check", "--sweep", "--max-points", "4"])), 0);
    assert_eq!(code(&ample(&["find-witness", "odometer", "--depth", "2"])), 2);
}

#[test]
fn input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"schema\": \"ample/witness/1\",\n \"presentation\": \"cuntz:2\", \"A\": [\"\"], \"k\": \"two\"}").unwrap();
    let out = ample(&["verify-witness", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("at k") && stderr(&out).contains("line 2"), "{}", stderr(&out));
    let pres = dir.path().join("p.json");
    fs::write(
        &pres,
        r#"{"schema": "ample/presentation/1", "space": {"kind": "finite", "n": 3},
            "generators": [{"kind": "partial_injection", "pairs": [[0, 1]]},
                           {"kind": "partial_injection", "pairs": [[0, 1], [2, 1]]}]}"#,
    )
    .unwrap();
    let out = ample(&["orbits", pres.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("g2"), "{}", stderr(&out));
    assert_eq!(code(&ample(&["state", "nonsense:1"])), 3);
    assert_eq!(code(&ample(&["find-witness", "cuntz:2", "--k", "5"])), 3);
    assert_eq!(code(&ample(&["find-witness", "cuntz:2", "--depth", "9"])), 3);
    assert_eq!(code(&ample(&["frobnicate"])), 3);
}

#[test]
fn inline_presentation_files() {
    let dir = tempfile::tempdir().unwrap();
    let pres = dir.path().join("p.json");
    fs::write(
        &pres,
        r#"{"schema": "ample/presentation/1", "space": {"kind": "finite", "n": 4},
            "generators": [{"kind": "partial_injection", "pairs": [[0, 1]]},
                           {"kind": "partial_injection", "pairs": [[2, 3]]}]}"#,
    )
    .unwrap();
    let p = pres.to_str().unwrap();
    let out = ample(&["ideal-check", p]);
    assert_eq!(code(&out), 0);
    let rep: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rep["ideals"], 4);
    let s = dir.path().join("s.json");
    assert_eq!(code(&ample(&["state", p, "-o", s.to_str().unwrap()])), 0);
    assert_eq!(json_file(&s)["presentation"]["space"]["n"], 4);
    assert_eq!(code(&ample(&["verify-cert", s.to_str().unwrap()])), 0);
}

#[test]
fn budget_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_ample"))
        .args(["find-witness", "cuntz:2", "--k", "3", "--l", "2", "--depth", "2"])
        .env("AMPLE_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    let rep: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rep["budget_hit"], true);
}

#[test]
fn deterministic_output() {
    let args = ["probe", "cuntz:2", "--samples", "10", "--seed", "5", "--depth", "1"];
    let a = ample(&args);
    let b = ample(&args);
    let mut seq = args.to_vec();
    seq.push("--sequential");
    let c = ample(&seq);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let w1 = ample(&["find-witness", "cuntz:3", "--set", "2", "--depth", "2"]);
    let w2 = ample(&["find-witness", "cuntz:3", "--set", "2", "--depth", "2", "--sequential"]);
    assert_eq!(code(&w1), 0);
    assert_eq!(w1.stdout, w2.stdout);
}
