use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_g2strata"));
    c.env_remove("G2STRATA_REGISTRY");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let o = run(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("g2strata-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn table_matches_golden_files() {
    for (fmt, file) in [("tsv", "table.tsv"), ("markdown", "table.md")] {
        let o = run(&["table", "--format", fmt]);
        assert_eq!(o.status.code(), Some(0));
        let golden = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(file)).unwrap();
        assert_eq!(stdout(&o), golden, "{fmt}");
    }
}

#[test]
fn table_json_has_fourteen_rows() {
    let v = json(&["table"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 14);
    let exact: Vec<&str> = rows.iter().filter(|r| r["dimension"]["exact"] == true).map(|r| r["stratum"].as_str().unwrap()).collect();
    assert_eq!(exact, ["V,gen", "V,2"]);
    assert_eq!(v["lower_bound"], 12);
}

#[test]
fn invariants_prints_chi_and_k2_only() {
    let o = run(&["invariants", "--degv1", "2", "--degtau", "1", "--b", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v, serde_json::json!({"chi": 2, "K2": 5}));
}

#[test]
fn invariants_optional_counts() {
    let v = json(&["invariants", "--degv1", "2", "--degtau", "1", "--b", "1", "--pa", "1", "--nu", "I1=1", "--pg", "2"]);
    assert_eq!(v["K2_from_fibres"], 5);
    assert_eq!(v["moduli_lower_bound"], 12);
}

#[test]
fn crit_reports_nineteen_points() {
    let v = json(&["crit", "--curve", "b61", "--seed", "7"]);
    assert_eq!(v["total"], 19);
    assert_eq!(v["distinct"], true);
    assert_eq!(v["family_sizes"], serde_json::json!([1, 3, 3, 3, 3, 3, 3]));
    assert_eq!(v["ok"], true);
}

#[test]
fn output_is_byte_identical_across_runs() {
    for args in [&["crit", "--seed", "11"][..], &["classify", "--label", "IVb"], &["case1-conic", "--curve", "b73"], &["verify-all"]] {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["frobnicate"][..],
        &["table", "--format", "yaml"],
        &["classify", "--label", "VIII"],
        &["crit", "--format", "tsv"],
        &["crit", "--curve", "nosuchcurve"],
        &["crit", "--tau", "0,0"],
        &["invariants", "--degv1", "2"],
        &["a6", "--label", "IIa", "--relation", "2w"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn unrealizable_construction_exits_one_with_a_reason() {
    let o = run(&["case1-conic", "--curve", "b37"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("4p in the kernel"), "{err}");
}

#[test]
fn every_subcommand_validates_against_its_schema() {
    let cases: &[(&str, &[&str])] = &[
        ("table", &["table"]),
        ("classify", &["classify", "--label", "IIIc"]),
        ("classify", &["classify", "--label", "IIa", "--curve", "b37"]),
        ("a6", &["a6", "--label", "IIIa", "--subcases"]),
        ("a6", &["a6", "--label", "V", "--relation", "2v"]),
        ("invariants", &["invariants", "--degv1", "2", "--degtau", "1", "--b", "1"]),
        ("crit", &["crit"]),
        ("zs-check", &["zs-check"]),
        ("bk-check", &["bk-check", "--curve", "b97"]),
        ("aut-dim", &["aut-dim"]),
        ("case1-conic", &["case1-conic"]),
        ("verify-all", &["verify-all"]),
    ];
    for (schema, args) in cases {
        let path = repo_root().join("schemas").join(format!("{schema}.schema.json"));
        let schema_json: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let validator = jsonschema::JSONSchema::compile(&schema_json).expect("schema compiles");
        let v = json(args);
        if let Err(errors) = validator.validate(&v) {
            let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
            panic!("{args:?} violates {schema}: {msgs:?}");
        };
    }
}

#[test]
fn indecomposable_classification_validates() {
    let e = json(&["crit"]);
    let tau = &e["instance"]["tau"];
    let tau = format!("{},{}", tau[0], tau[1]);
    let v = json(&["classify", "--indec", "--tau", &tau, "--q", "37,32"]);
    assert_eq!(v["v1"], "indecomposable");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(repo_root().join("schemas/classify.schema.json")).unwrap()).unwrap();
    assert!(jsonschema::JSONSchema::compile(&schema).unwrap().is_valid(&v));
}

fn roundtrip(args: &[&str], file: &str) {
    let path = scratch(file);
    let path_s = path.to_str().unwrap();
    let mut save = args.to_vec();
    save.extend(["--save-instance", path_s]);
    let first = run(&save);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    let stored: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(stored["kind"].is_string() && stored["seed"].is_u64());
    let loaded = run(&[args[0], "--instance", path_s]);
    assert_eq!(loaded.status.code(), Some(0), "{}", String::from_utf8_lossy(&loaded.stderr));
    let a: Value = serde_json::from_slice(&first.stdout).unwrap();
    let b: Value = serde_json::from_slice(&loaded.stdout).unwrap();
    assert_eq!(a["checks"], b["checks"]);
    assert_eq!(a["ok"], b["ok"]);
}

#[test]
fn instance_files_reproduce_the_run() {
    roundtrip(&["crit", "--seed", "3"], "crit.json");
    roundtrip(&["case1-conic", "--curve", "b97"], "case1.json");
    roundtrip(&["classify", "--label", "IIb"], "split.json");
}

#[test]
fn loaded_case_v_instance_gives_the_same_points() {
    let path = scratch("casev.json");
    let p = path.to_str().unwrap();
    let a = json(&["crit", "--seed", "5", "--save-instance", p]);
    let b = json(&["crit", "--instance", p]);
    assert_eq!(a["critical_points"], b["critical_points"]);
}

#[test]
fn instance_of_the_wrong_kind_is_rejected() {
    let path = scratch("wrong.json");
    let p = path.to_str().unwrap();
    json(&["case1-conic", "--save-instance", p]);
    let o = run(&["crit", "--instance", p]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn registry_override_through_the_environment() {
    let path = scratch("registry.json");
    std::fs::write(&path, r#"{"curves": [{"name": "mine", "spec": "73:1:10"}]}"#).unwrap();
    let o = bin().env("G2STRATA_REGISTRY", &path).args(["crit", "--curve", "mine"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["instance"]["curve"], "73:1:10");
    let flag = run(&["--registry", path.to_str().unwrap(), "crit", "--curve", "mine"]);
    assert_eq!(flag.stdout, o.stdout);
}

#[test]
fn verify_all_passes_every_criterion() {
    let o = run(&["verify-all", "--format", "tsv"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    let lines: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(lines.len(), 9);
    assert!(lines.iter().all(|l| l.split('\t').nth(1) == Some("pass")), "{text}");
}
