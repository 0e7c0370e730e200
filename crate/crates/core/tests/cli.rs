use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn instances() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("instances")
}

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_coarselab")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("coarselab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn path(name: &str) -> String {
    instances().join(name).to_string_lossy().into_owned()
}

#[test]
fn abc_example_checks_with_regularity_witness() {
    let (code, out) = run(&["check", &path("paper-abc.json")]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("LS-regular: false"));
    assert!(out.contains("result: pass"));
}

#[test]
fn missing_singleton_family_fails_axiom_i() {
    let text = std::fs::read_to_string(instances().join("paper-abc.json")).unwrap();
    let mut doc: Value = serde_json::from_str(&text).unwrap();
    let fams = doc["lsr"]["families"].as_array_mut().unwrap();
    fams.retain(|f| f != &serde_json::json!([["c"]]));
    let p = scratch("mutated.json", &doc.to_string());
    let (code, out) = run(&["check", p.to_str().unwrap()]);
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("[FAIL] i"));
    assert!(out.contains("witness: {{c}} is missing"));
}

#[test]
fn schema_errors_exit_2() {
    let p = scratch("bad.json", r#"{"version":"coarselab/1","space":"nat-line","lsr":{"backend":"nope"}}"#);
    assert_eq!(run(&["check", p.to_str().unwrap()]).0, 2);
    assert_eq!(run(&["check", "/nonexistent.json"]).0, 2);
    let p = scratch("label.json", r#"{"version":"coarselab/1","space":{"universe":["a"]},"lsr":{"backend":"partition","classes":[["q"]]}}"#);
    assert_eq!(run(&["check", p.to_str().unwrap()]).0, 2);
}

#[test]
fn caps_exit_3() {
    assert_eq!(run(&["mine", "--max-size", "5"]).0, 3);
    assert_eq!(run(&["mine", "--max-size", "3", "--cap", "2"]).0, 3);
}

#[test]
fn unknown_dominated_exits_4() {
    let body = r#"{"version":"coarselab/1","space":"nat-line","lsr":{"backend":"metric-line"},
        "budget":{"window":8,"scale":4},
        "queries":[{"lines":[{"kind":"geometric","coefficient":1,"base":2,"start":1},
                             {"kind":"geometric","coefficient":1,"base":4,"start":1},
                             {"kind":"geometric","coefficient":1,"base":8,"start":1}]}]}"#;
    let p = scratch("unknown.json", body);
    let (code, out) = run(&["near", p.to_str().unwrap()]);
    assert_eq!(code, 4, "{out}");
    assert!(out.contains("unknown"));
}

#[test]
fn json_output_is_deterministic() {
    let a = run(&["--json", "near", &path("paper-abc.json")]);
    let b = run(&["--json", "near", &path("paper-abc.json")]);
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a.1).unwrap();
    assert_eq!(v["verdicts"][0]["outcome"], "yes");
    assert_eq!(v["verdicts"][1]["outcome"], "no");
}

#[test]
fn line_commands() {
    let (code, out) = run(&["asdim", &path("topo-line.json")]);
    assert_eq!(code, 0);
    assert!(out.contains("asdim = 1 certified at windows {16,32,64,128,256,512}"));
    let (code, out) = run(&["--window", "128", "asdim", &path("topo-line.json")]);
    assert_eq!(code, 0);
    assert!(out.contains("windows {16,32,64,128}"));
    let (code, out) = run(&["bunch", &path("evens-odds.json")]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("scales refuted: 33/33"));
    let (code, out) = run(&["map", &path("doubling-halving.json")]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("doubling: f is a map: yes, g is a map: yes"));
    assert_eq!(run(&["check", &path("nat-line-metric.json")]).0, 0);
}

#[test]
fn disconnected_partition_nearness_fails_axiom_iv() {
    let (code, out) = run(&["check", &path("two-pairs.json")]);
    assert_eq!(code, 1);
    assert!(out.contains("[FAIL] iv"));
    assert_eq!(run(&["check", &path("partition-abcd.json")]).0, 0);
}

#[test]
fn mined_instance_rechecks() {
    let (code, out) = run(&["--json", "--seed", "3", "mine", "--max-size", "3"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["found"], true);
    let p = scratch("mined.json", &v["instance"].to_string());
    let (code, out) = run(&["check", p.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("LS-regular: false"));
}
