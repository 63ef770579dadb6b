use std::process::{Command, Output};

use serde_json::Value;

fn holocirc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holocirc"))
        .args(args)
        .env_remove("HOLOCIRC_MAX_DEGREE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn lines(o: &Output) -> Vec<Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn scan_counts_pair_orbit_masks() {
    let o = holocirc(&["scan", "--modulus", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let records = lines(&o);
    assert_eq!(records.len(), 16);
    assert!(records.iter().all(|r| r["nnn"] == false));
    assert_eq!(records[1]["S"], serde_json::json!([1, 7]));
    assert_eq!(records[1]["aut_order"], 16);
}

#[test]
fn shards_are_slices_of_the_full_scan() {
    let full = holocirc(&["scan", "--modulus", "9"]);
    let first = holocirc(&["scan", "--modulus", "9", "--shard", "0/2"]);
    let second = holocirc(&["scan", "--modulus", "9", "--shard", "1/2"]);
    assert_eq!(lines(&first).len(), 8);
    assert_eq!(stdout(&first) + &stdout(&second), stdout(&full));
    // byte-identical reruns
    assert_eq!(stdout(&full), stdout(&holocirc(&["scan", "--modulus", "9"])));
}

#[test]
fn scan_writes_to_file_and_filters_connected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("z12.ndjson");
    let o = holocirc(&["scan", "--modulus", "12", "--connected-only", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let records: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(!records.is_empty() && records.len() < 64);
    assert!(records.iter().all(|r| r["connected"] == true));
    assert!(stdout(&o).is_empty());
}

#[test]
fn verify_reports_pass_and_fail() {
    let o = holocirc(&["verify", "cyclic-nnn-scan", "--modulus", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let r = &lines(&o)[0];
    assert_eq!(r["status"], "pass");
    assert_eq!(r["replay"], "holocirc verify cyclic-nnn-scan --modulus 8");

    let o = holocirc(&["verify", "regular-classification", "--n", "3"]);
    assert_eq!(o.status.code(), Some(1));
    let r = &lines(&o)[0];
    assert_eq!(r["status"], "fail");
    let failure = r["evidence"].as_array().unwrap().iter().find(|e| e.get("representative").is_some()).unwrap();
    assert_eq!(failure["representative"], "modular");

    let o = holocirc(&["verify", "semiregular-classification", "--n", "3..5"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn usage_and_bound_errors() {
    assert_eq!(holocirc(&["verify", "no-such-claim"]).status.code(), Some(2));
    assert_eq!(holocirc(&["classify", "--n", "9"]).status.code(), Some(2));
    assert_eq!(holocirc(&["graph", "--modulus", "8", "--set", "1,2"]).status.code(), Some(2));
    assert_eq!(holocirc(&["scan", "--modulus", "40"]).status.code(), Some(3));
    assert_eq!(holocirc(&["verify", "point-stabilizer", "--n", "3..9"]).status.code(), Some(3));
    assert_eq!(holocirc(&["graph", "--modulus", "40", "--set", "1,39", "--force"]).status.code(), Some(0));
}

#[test]
fn config_file_sets_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bounds.toml");
    std::fs::write(&cfg, "max_degree = 8\nmax_exponent = 4\n").unwrap();
    let c = cfg.to_str().unwrap();
    assert_eq!(holocirc(&["--config", c, "scan", "--modulus", "9"]).status.code(), Some(3));
    assert_eq!(holocirc(&["--config", c, "scan", "--modulus", "8"]).status.code(), Some(0));
    assert_eq!(holocirc(&["--config", c, "classify", "--n", "5"]).status.code(), Some(3));
    assert_eq!(holocirc(&["--config", c, "--force", "classify", "--n", "5"]).status.code(), Some(0));
}

#[test]
fn classify_lists_representatives() {
    let o = holocirc(&["classify", "--n", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let reps = doc["representatives"].as_array().unwrap();
    // translations, cyclic t = 0, 1, and five non-cyclic types
    assert_eq!(reps.len(), 8);
    assert!(reps.iter().all(|r| r["regular"] == true));
    assert_eq!(doc["enumeration"]["regular_count"], 16);

    let o = holocirc(&["classify", "--n", "3"]);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let reps = doc["representatives"].as_array().unwrap();
    assert!(reps.iter().any(|r| r["coincides_with"]["type"] == "direct-product"));
}

#[test]
fn element_and_graph_queries() {
    let o = holocirc(&["element", "--n", "4", "a^3*x*y", "--power", "2"]);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["normal_form"], "a*x*y");
    assert_eq!(doc["order"], 8);

    let o = holocirc(&["graph", "--modulus", "4", "--set", "1,3", "--edges"]);
    assert_eq!(stdout(&o), "0 1\n0 3\n1 2\n2 3\n");

    let o = holocirc(&["graph", "--modulus", "16", "--set", "1,3,5,7,9,11,13,15"]);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["record"]["normal"], false);
    assert_eq!(doc["record"]["witnesses"][0]["kind"], "two-part");
}

#[test]
fn claims_are_listed() {
    let o = holocirc(&["claims"]);
    assert_eq!(stdout(&o).lines().count(), 20);
}
