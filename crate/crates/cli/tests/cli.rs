use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mmphf-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn chif_of_small_conflict_graph() {
    let v = json(&["chif", "--graph", "conflict", "--m", "2", "--M", "4", "--format", "json"]);
    assert_eq!(v["chi_f"], "2/1");
    assert_eq!(v["verified"]["primal_value"], "2/1");
    assert_eq!(v["verified"]["dual_value"], "2/1");
    assert_eq!(v["verified"]["equal"], true);
    assert_eq!(v["primal"]["value"], "2/1");
}

#[test]
fn default_constant_traces_are_clean() {
    let v = json(&["sample", "--m", "3", "--paper-defaults", "--trials", "100", "--seed", "7"]);
    let traces = v["traces"].as_array().unwrap();
    assert_eq!(traces.len(), 100);
    assert!(traces.iter().all(|t| t["ok"] == true && t["violations"].as_array().unwrap().is_empty()));
    assert_eq!(v["params"]["k"], "27");
    assert_eq!(v["params"]["s0"], "531441");
    assert_eq!(v["metadata"]["seed"], 7);
}

#[test]
fn cap_overflow_exits_with_two() {
    let out = run(&["chif", "--graph", "conflict", "--m", "4", "--M", "100"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("enumeration cap exceeded"));
    assert!(stderr(&out).contains("max_vertices"));
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_and_validation_errors_exit_with_two() {
    for args in [
        vec!["chi", "--bogus"],
        vec!["frobnicate"],
        vec!["chi", "--graph", "conflict", "--m", "2"],
        vec!["chi", "--graph", "conflict", "--m", "2", "--M", "5", "--max-vertices", "0"],
        vec!["sample", "--m", "2", "--k", "2", "--s0", "7"],
        vec!["prune", "--arity", "2", "--depth", "1", "--len", "4", "--tau", "1/2", "--labels", "1,2"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!stderr(&out).is_empty(), "{args:?}");
    }
}

#[test]
fn identical_flags_give_identical_bytes() {
    let cases: [&[&str]; 5] = [
        &["sample", "--m", "2", "--paper-defaults", "--trials", "20", "--seed", "3", "--values"],
        &["case1-sweep", "--instances", "50", "--seed", "11", "--format", "csv"],
        &["prune", "--arity", "3", "--depth", "2", "--len", "18", "--tau", "1/3", "--bias", "2/5", "--seed", "5"],
        &["mmphf-verify", "--m", "2", "--M", "6", "--seed", "9"],
        &["chi", "--graph", "shift", "--n", "2", "--u", "7", "--format", "csv"],
    ];
    for args in cases {
        let a = run(args);
        let b = run(args);
        assert!(a.status.success(), "{args:?}: {}", stderr(&a));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let a = run(&["case1-sweep", "--instances", "50", "--seed", "11"]);
    let b = run(&["case1-sweep", "--instances", "50", "--seed", "12"]);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn every_artifact_carries_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let keys = dir.path().join("keys.txt");
    std::fs::write(&keys, "u=30\n2\n9\n10\n27\n").unwrap();
    let dist = dir.path().join("dist.txt");
    std::fs::write(&dist, "1,3,1/2\n2,4,1/4\n1,2,1/4\n").unwrap();
    let keys = keys.to_str().unwrap();
    let dist = dist.to_str().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["graph", "--graph", "cycle", "--n", "5"],
        vec!["chi", "--graph", "complete", "--n", "4"],
        vec!["chif", "--graph", "cycle", "--n", "5"],
        vec!["sample", "--m", "2", "--k", "2", "--s0", "8", "--trials", "3"],
        vec!["enumerate", "--m", "1", "--k", "2", "--s0", "4"],
        vec!["adversary", "--dist", dist],
        vec!["prune", "--arity", "2", "--depth", "2", "--len", "8", "--tau", "1/4", "--labels", "2,2,2,2,1,1,1,1"],
        vec!["case1-sweep", "--instances", "5"],
        vec!["mmphf-verify", "--keys", keys],
        vec!["bound-report", "--m", "2", "--M", "5"],
        vec!["sx-roundtrip", "--d", "3"],
        vec!["parameterize", "--n", "65536", "--u", "2^2^64"],
    ];
    for args in &cases {
        let mut with_seed = args.clone();
        with_seed.extend(["--seed", "42"]);
        let v = json(&with_seed);
        let meta = &v["metadata"];
        assert_eq!(meta["seed"], 42, "{args:?}");
        assert_eq!(meta["version"], env!("CARGO_PKG_VERSION"), "{args:?}");
        assert_eq!(meta["rng"], "chacha8", "{args:?}");
        assert_eq!(meta["config"]["command"]["subcommand"], args[0], "{args:?}");

        with_seed.extend(["--format", "csv"]);
        let out = run(&with_seed);
        assert!(out.status.success(), "{args:?}: {}", stderr(&out));
        let text = String::from_utf8(out.stdout).unwrap();
        let first = text.lines().next().unwrap();
        let meta: Value = serde_json::from_str(first.strip_prefix("# ").unwrap()).unwrap();
        assert_eq!(meta["seed"], 42, "{args:?}");
    }
}

#[test]
fn output_flag_writes_the_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chi.json");
    let out = run(&["chi", "--graph", "cycle", "--n", "5", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["chi"], 3);
}

#[test]
fn dimacs_export_reads_back() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.dimacs");
    let out = run(&[
        "graph", "--graph", "conflict", "--m", "2", "--M", "5", "--export", "dimacs", "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("c {"));
    let direct = json(&["chif", "--graph", "conflict", "--m", "2", "--M", "5"]);
    let via_file = json(&["chif", "--graph", "dimacs", "--input", path.to_str().unwrap()]);
    assert_eq!(direct["chi_f"], via_file["chi_f"]);
    assert_eq!(direct["edges"], via_file["edges"]);
}

#[test]
fn csv_columns_are_fixed() {
    let out = run(&["chif", "--graph", "cycle", "--n", "5", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines().skip(1);
    assert_eq!(lines.next(), Some("kind,members,weight"));
    assert!(lines.all(|l| l.split(',').count() == 3 && l.split(',').nth(2).unwrap().contains('/')));
}

#[test]
fn verify_flags_the_broken_control() {
    let v = json(&["mmphf-verify", "--m", "2", "--M", "8"]);
    assert_eq!(v["correct_schemes_proper"], true);
    assert_eq!(v["broken_control_detected"], true);
    let v = json(&["sx-roundtrip", "--d", "6"]);
    for row in v["rows"].as_array().unwrap() {
        let correct = row["scheme"] != "broken-constant";
        assert_eq!(row["all_distinguished"], correct, "{row}");
    }
}
