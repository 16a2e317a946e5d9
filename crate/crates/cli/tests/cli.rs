use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bqap(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bqap"))
        .args(args)
        .current_dir(dir)
        .env_remove("BQAP_LIMIT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let o = bqap(dir, args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

fn t1(dir: &Path) {
    ok(dir, &["gen", "--kind", "tightness", "--m", "2", "--n", "2", "--out", "t1.json"]);
}

#[test]
fn avg_of_single_unit_entry() {
    let dir = TempDir::new().unwrap();
    t1(dir.path());
    assert_eq!(ok(dir.path(), &["avg", "--instance", "t1.json"]), "1/4\n");
    let json: serde_json::Value =
        serde_json::from_str(&ok(dir.path(), &["--json", "avg", "--instance", "t1.json"])).unwrap();
    assert_eq!(json["average"], "1/4");
}

#[test]
fn dominate_then_count() {
    let dir = TempDir::new().unwrap();
    t1(dir.path());
    ok(dir.path(), &["solve", "--instance", "t1.json", "--method", "dominate", "--out", "d.json"]);
    let out = ok(dir.path(), &["--json", "exact", "--instance", "t1.json", "--dominates", "d.json"]);
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(json["domination_count"], "16");
    assert_eq!(json["count"], "16");
    assert_eq!(json["mean"], "1/4");
}

#[test]
fn enumeration_limit_exit_code() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["gen", "--kind", "random", "--m", "6", "--n", "6", "--out", "big.json"]);
    let o = bqap(dir.path(), &["exact", "--instance", "big.json"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("2176782336"), "{err}");

    let o = Command::new(env!("CARGO_BIN_EXE_bqap"))
        .args(["exact", "--instance", "t1.json"])
        .current_dir(dir.path())
        .env("BQAP_LIMIT", "15")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2), "missing file is checked first");
    t1(dir.path());
    let o = Command::new(env!("CARGO_BIN_EXE_bqap"))
        .args(["exact", "--instance", "t1.json"])
        .current_dir(dir.path())
        .env("BQAP_LIMIT", "15")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn bad_input_exit_codes() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    assert_eq!(bqap(d, &["avg", "--instance", "missing.json"]).status.code(), Some(2));
    assert_eq!(bqap(d, &["frobnicate"]).status.code(), Some(2));
    std::fs::write(d.join("bad.json"), r#"{"variant": 3, "m": 1, "n": 1, "q": [[[[0]]]], "c": [[0]], "d": [[0]]}"#).unwrap();
    let o = bqap(d, &["avg", "--instance", "bad.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("variant"));
    assert_eq!(
        bqap(d, &["gen", "--kind", "partition", "--elements", "1,2,3", "--out", "p.json"]).status.code(),
        Some(2)
    );
    assert_eq!(bqap(d, &["gen", "--kind", "random", "--out", "r.json"]).status.code(), Some(2));
}

#[test]
fn adversarial_start_and_escape() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(d, &["gen", "--kind", "adversarial", "--m", "2", "--n", "2", "--L", "100", "--out", "adv.json"]);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("adv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["optimal_value"], "-100");
    let start = ["--instance", "adv.json", "--start", "adv.solution.json"];
    for (method, expect) in [("ls-swap", -2), ("ls-cswap", -2), ("alternate", -2), ("ls-oswap", -100)] {
        let mut args = vec!["--json", "solve", "--method", method];
        args.extend(start);
        let json: serde_json::Value = serde_json::from_str(&ok(d, &args)).unwrap();
        assert_eq!(json["value"], expect, "{method}");
        assert_eq!(json["method"], method);
    }
}

#[test]
fn verify_and_dominate_exact() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(d, &["gen", "--kind", "random", "--variant", "2", "--m", "3", "--n", "2", "--seed", "7", "--out", "r.json"]);
    let out = ok(d, &["verify", "--instance", "r.json"]);
    assert_eq!(out.lines().count(), 4);
    assert!(out.lines().all(|l| l.starts_with("PASS")));
    let json: serde_json::Value =
        serde_json::from_str(&ok(d, &["--json", "dominate", "--instance", "r.json", "--exact"])).unwrap();
    let count: u64 = json["exact"]["domination_count"].as_str().unwrap().parse().unwrap();
    assert!(count >= json["exact"]["witness_union"].as_u64().unwrap());
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let gen = ["gen", "--kind", "random", "--m", "3", "--n", "3", "--seed", "11", "--out"];
    ok(d, &[&gen[..], &["a.json"]].concat());
    ok(d, &[&gen[..], &["b.json"]].concat());
    assert_eq!(std::fs::read(d.join("a.json")).unwrap(), std::fs::read(d.join("b.json")).unwrap());
    for args in [
        vec!["--json", "exact", "--instance", "a.json"],
        vec!["--json", "--threads", "1", "exact", "--instance", "a.json"],
        vec!["--json", "solve", "--instance", "a.json", "--method", "ls-oswap", "--seed", "3", "--trace"],
        vec!["--json", "dominate", "--instance", "a.json"],
    ] {
        assert_eq!(ok(d, &args), ok(d, &args));
    }
    let one = ok(d, &["--json", "--threads", "1", "exact", "--instance", "a.json"]);
    let four = ok(d, &["--json", "--threads", "4", "exact", "--instance", "a.json"]);
    assert_eq!(one, four);
}

#[test]
fn embed_round_trip_through_files() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(d, &["gen", "--kind", "random", "--m", "1", "--n", "2", "--seed", "5", "--out", "o.json"]);
    ok(d, &["gen", "--kind", "embed", "--instance", "o.json", "--a", "2", "--b", "1", "--out", "e.json"]);
    let min = |f: &str| -> serde_json::Value {
        serde_json::from_str::<serde_json::Value>(&ok(d, &["--json", "exact", "--instance", f])).unwrap()["min_value"].clone()
    };
    assert_eq!(min("o.json"), min("e.json"));
}
