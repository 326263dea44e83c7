use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arity-lab"))
        .args(args)
        .current_dir(dir)
        .env_remove("ARITY_LAB_SEED")
        .output()
        .expect("binary runs")
}

fn json_stdout(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is a JSON report")
}

#[test]
fn unknown_flag_exits_2_with_usage() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["setsys", "--l", "3", "--bogus"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn missing_structure_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["arity", "--structure", "missing.json", "--l", "3"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.json"));
    let report = json_stdout(&o);
    assert_eq!(report["exit_code"], 2);
}

#[test]
fn gen_then_arity_finds_the_johnson_witness() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["gen", "johnson", "--n", "4", "--k", "2", "-o", "j.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["arity", "--structure", "j.json", "--l", "3", "-o", "w.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let w: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("w.json")).unwrap()).unwrap();
    assert_eq!(w["result"]["outcome"]["verdict"], "witness");
    let o = run(&["arity", "--structure", "j.json", "--l", "4"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["arity", "--structure", "j.json", "--l", "3", "--budget", "2"], dir.path());
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn generated_structures_are_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let gen = |seed: &str, out: &str| {
        let o = run(&["gen", "kaygraph", "--n", "7", "--k", "2", "--seed", seed, "-o", out], dir.path());
        assert_eq!(o.status.code(), Some(0));
        std::fs::read(dir.path().join(out)).unwrap()
    };
    assert_eq!(gen("3", "a.json"), gen("3", "b.json"));
    assert_ne!(gen("3", "a.json"), gen("4", "c.json"));
    let with_env = Command::new(env!("CARGO_BIN_EXE_arity-lab"))
        .args(["gen", "kaygraph", "--n", "7", "--k", "2", "-o", "d.json"])
        .current_dir(dir.path())
        .env("ARITY_LAB_SEED", "3")
        .output()
        .unwrap();
    assert_eq!(with_env.status.code(), Some(0));
    assert_eq!(std::fs::read(dir.path().join("d.json")).unwrap(), gen("3", "a.json"));
}

#[test]
fn cherlin_lachlan_orbit_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["gen", "cherlin-lachlan", "--n", "6", "--max-arity", "2", "--orbit-csv", "o.csv", "-o", "c.json"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let counts: Vec<u64> = serde_json::from_value(json_stdout(&o)["result"]["extra"]["orbit_counts"].clone()).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("o.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("code,arity,representative"));
    assert_eq!(lines.count() as u64, counts.iter().sum::<u64>());
    assert_eq!(counts[0], 1);
}

#[test]
fn goode_report_lists_tuples_and_maps() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["goode", "--n", "2", "--labels", "3", "--depth", "3", "--radius", "2", "-o", "g.json"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json_stdout(&o);
    let result = &r["result"];
    assert_eq!(result["b"].as_array().unwrap().len(), 8);
    assert_eq!(result["a"].as_array().unwrap().len(), 4);
    assert_eq!(result["radius"], 2);
    assert_eq!(result["agreement"]["drops"].as_array().unwrap().len(), 8);
    assert!(dir.path().join("g.json").exists());
    // a radius beyond the depth is refused
    let o = run(&["goode", "--n", "1", "--depth", "1", "--radius", "2"], dir.path());
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn johnson_extend_reads_an_instance() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("iso.json"),
        r#"{"S":[[0,1,2],[0,3,4]],"T":[[5,6,7],[5,8,9]],"alpha":[1,0]}"#,
    )
    .unwrap();
    let o = run(
        &["johnson-extend", "--n", "10", "--k", "3", "--instance", "iso.json", "-o", "s.json"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let sigma = &json_stdout(&o)["result"]["sigma"];
    assert_eq!(sigma, &serde_json::json!([[0, 5], [1, 8], [2, 9], [3, 6], [4, 7]]));
    // intersection sizes disagree
    std::fs::write(dir.path().join("bad.json"), r#"{"S":[[0,1,2],[0,3,4]],"T":[[5,6,7],[8,9,1]],"alpha":[0,1]}"#)
        .unwrap();
    let o = run(&["johnson-extend", "--n", "10", "--k", "3", "--instance", "bad.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn distal_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["distal", "parity", "--k", "3", "--samples", "2000"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_stdout(&o)["result"]["violations"], 0);
    let o = run(&["distal", "witness", "--k", "3", "--format", "text"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("full sequence indiscernible: false"));
    let o = run(&["distal", "strong-check", "--k", "2", "--samples", "200"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_stdout(&o)["result"]["violations"], 0);
    let o = run(&["distal", "witness", "--k", "1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn csv_and_text_formats() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["setsys", "--l", "3", "--format", "csv"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.starts_with("field,value\n"));
    assert!(out.contains("result.pass,true"));
    let o = run(&["setsys", "--l", "3", "--format", "text"], dir.path());
    assert!(String::from_utf8(o.stdout).unwrap().contains("all verified: true"));
}

#[test]
fn reproduce_single_items() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["reproduce", "--list", "--format", "text"], dir.path());
    let listed = String::from_utf8(o.stdout).unwrap();
    for item in arity_lab::reproduce::Item::ALL {
        assert!(listed.lines().any(|l| l == item.name()));
    }
    let o = run(
        &["reproduce", "--item", "johnson_triples", "--item", "goode_n2", "--format", "text"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("PASS johnson_triples") && text.contains("PASS goode_n2"));
    assert!(text.contains("radius Some(2)"));
    let o = run(&["reproduce", "--item", "nope"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}
