use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn scratch(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stargroup"))
        .args(args)
        .env_remove("STARGROUP_BUDGET")
        .output()
        .expect("binary runs")
}

fn path(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(o: &Output) -> Vec<Value> {
    let v: Value = serde_json::from_slice(&o.stdout).expect("json report");
    v.as_array().expect("array of rows").clone()
}

fn assert_schema(rows: &[Value]) {
    for r in rows {
        let keys: Vec<&str> = r.as_object().unwrap().keys().map(String::as_str).collect();
        assert!(keys == ["check", "instance", "pass"] || keys == ["check", "instance", "pass", "witness"], "{keys:?}");
    }
}

#[test]
fn classify_i2_all_flags() {
    let o = run(&["--format", "json", "classify", path(&fixture("i2.json"))]);
    assert_eq!(o.status.code(), Some(0));
    let rows = rows(&o);
    assert_schema(&rows);
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().all(|r| r["pass"] == true));
}

#[test]
fn classify_lz2_matches_golden() {
    let o = run(&["--format", "json", "classify", path(&fixture("lz2.json"))]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), fs::read_to_string(fixture("golden/classify_lz2.json")).unwrap());
    let t = run(&["classify", path(&fixture("lz2.json"))]);
    assert_eq!(stdout(&t), fs::read_to_string(fixture("golden/classify_lz2.txt")).unwrap());
}

#[test]
fn adjunction_on_p21() {
    let o = run(&["--format", "json", "adjunction", "--presheaf", path(&fixture("p21.json"))]);
    assert_eq!(o.status.code(), Some(0));
    let rows = rows(&o);
    assert_schema(&rows);
    let checks: Vec<&str> = rows.iter().map(|r| r["check"].as_str().unwrap()).collect();
    for c in ["unit-iso", "triangle-lambda", "triangle-gamma"] {
        assert!(checks.contains(&c), "{c}");
    }
}

#[test]
fn constant_map_counit() {
    let o = run(&["--format", "json", "adjunction", "--morphism", path(&fixture("const_c2_t1.json"))]);
    assert_eq!(o.status.code(), Some(0));
    let rows = rows(&o);
    let row = rows.iter().find(|r| r["check"] == "counit-biconditional").unwrap();
    assert_eq!(row["witness"]["bijective"], false);
    assert_eq!(row["witness"]["expected"], false);
}

#[test]
fn verify_order_three() {
    let o = run(&["verify", "--all", "--max-order", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with(" checks, 0 failed\n"));
}

#[test]
fn verify_output_independent_of_jobs() {
    let a = run(&["--format", "json", "--jobs", "1", "verify", "--all", "--max-order", "3"]);
    let b = run(&["--format", "json", "--jobs", "4", "verify", "--all", "--max-order", "3"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_list() {
    let o = run(&["--format", "json", "verify", "--list"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 22);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["classify", "no/such/file.json"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["family", "nonesuch", "2"]).status.code(), Some(2));
    let bad = scratch("bad_star.json");
    fs::write(&bad, r#"{"order": 2, "mul": [[0, 0], [0, 1]], "star": [1, 0]}"#).unwrap();
    assert_eq!(run(&["validate", path(&bad)]).status.code(), Some(1));
    let garbled = scratch("garbled.json");
    fs::write(&garbled, "{").unwrap();
    assert_eq!(run(&["classify", path(&garbled)]).status.code(), Some(2));
}

#[test]
fn budget_exhaustion() {
    let id = fixture("id_i2.json");
    let o = run(&["--budget", "1", "gamma", "--strategy", "generic", path(&id)]);
    assert_eq!(o.status.code(), Some(3));
    let env = Command::new(env!("CARGO_BIN_EXE_stargroup"))
        .args(["gamma", "--strategy", "generic", path(&id)])
        .env("STARGROUP_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(env.status.code(), Some(3));
    assert_eq!(run(&["gamma", "--strategy", "generic", path(&id)]).status.code(), Some(0));
}

#[test]
fn enumeration_counts() {
    for (n, count) in [(1, 1), (2, 4), (3, 18), (4, 126)] {
        let o = run(&["enumerate", "--order", &n.to_string()]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o).lines().count(), count, "order {n}");
    }
}

#[test]
fn family_matches_fixture() {
    let o = run(&["family", "symmetric_inverse", "2"]);
    let fam: Value = serde_json::from_slice(&o.stdout).unwrap();
    let fix: Value = serde_json::from_str(&fs::read_to_string(fixture("i2.json")).unwrap()).unwrap();
    assert_eq!(fam["mul"], fix["mul"]);
    assert_eq!(fam["star"], fix["star"]);
}

#[test]
fn written_files_match_golden() {
    let g = scratch("i2_groupoid.json");
    assert_eq!(run(&["groupoid", path(&fixture("i2.json")), "--out", path(&g)]).status.code(), Some(0));
    assert_eq!(fs::read(&g).unwrap(), fs::read(fixture("golden/i2_groupoid.json")).unwrap());
    assert_eq!(run(&["validate", path(&g)]).status.code(), Some(0));

    let l = scratch("p21_lambda.json");
    assert_eq!(run(&["lambda", path(&fixture("p21.json")), "--out", path(&l)]).status.code(), Some(0));
    assert_eq!(fs::read(&l).unwrap(), fs::read(fixture("golden/p21_lambda.json")).unwrap());

    let d = scratch("fhat_id_sl2.json");
    let o = run(&["fhat", path(&fixture("id_sl2.json")), "--dump", path(&d), "--with-product"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read(&d).unwrap(), fs::read(fixture("golden/fhat_id_sl2.json")).unwrap());
}

#[test]
fn seed_does_not_change_verdicts() {
    let a = run(&["--format", "json", "--seed", "1", "fhat", path(&fixture("id_i2.json"))]);
    let b = run(&["--format", "json", "--seed", "99", "fhat", path(&fixture("id_i2.json"))]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn every_fixture_validates() {
    for entry in fs::read_dir(fixture("")).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "json") {
            assert_eq!(run(&["validate", path(&p)]).status.code(), Some(0), "{}", p.display());
        }
    }
}
