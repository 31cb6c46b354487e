use std::path::Path;
use std::process::Command;

use qheis_cli::report::Report;

fn qheis(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qheis")).args(args).env_remove("QHEIS_CACHE_DIR").output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn json_of(args: &[&str]) -> (i32, String) {
    let mut all = args.to_vec();
    all.extend(["--json", "-"]);
    let (code, out, _) = qheis(&all);
    (code, out)
}

fn validator() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/report.schema.json");
    let schema: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn assert_valid(text: &str) -> Report {
    let v: serde_json::Value = serde_json::from_str(text).unwrap();
    let val = validator();
    let errs: Vec<String> = val.iter_errors(&v).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errs.is_empty(), "{errs:?}");
    // the typed struct rejects unknown fields as well
    serde_json::from_value(v).unwrap()
}

#[test]
fn gseries_examples() {
    let (code, out) = json_of(&["gseries", "--N", "2", "--K", "3"]);
    assert_eq!(code, 0);
    let rep = assert_valid(&out);
    let texts: Vec<_> = rep.coefficients.unwrap().into_iter().map(|c| c.text).collect();
    assert_eq!(texts, ["1", "0", "C/2 + 1", "-C^2/2 - C"]);

    let (code, out) = json_of(&["gseries", "--N", "3", "--K", "0"]);
    assert_eq!(code, 0);
    let rep = assert_valid(&out);
    assert_eq!(rep.coefficients.unwrap().len(), 1);
}

#[test]
fn pbw_reduce_examples() {
    let (code, out, _) = qheis(&["pbw-reduce", "y1(1) y1(-1)", "--N", "2"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("y1(-1) y1(1) + [C/2 + O(h"), "{out}");
    let (_, out, _) = qheis(&["pbw-reduce", "yN(-1)", "--N", "4"]);
    assert!(out.starts_with("-y1(-1) - y2(-1) - y3(-1)\n"), "{out}");
    let (_, out, _) = qheis(&["pbw-reduce", "y2(-3) y1(0) y1(2)", "--N", "3"]);
    assert!(out.starts_with("y2(-3) y1(0) y1(2)\n"), "{out}");
    let (code, out) = json_of(&["pbw-reduce", "y1(2) y2(-2)", "--N", "3"]);
    assert_eq!(code, 0);
    let rep = assert_valid(&out);
    assert_eq!(rep.normal_form.unwrap().terms.len(), 2);
}

#[test]
fn verify_examples_pass() {
    for args in [
        &["verify", "ybe", "--N", "2", "--c", "1", "--K", "4", "--samples", "20", "--seed", "7"][..],
        &["verify", "tr34", "--N", "4", "--K", "12"],
        &["verify", "classical", "--N", "3", "--c", "-2", "--K", "2"],
    ] {
        let (code, out) = json_of(args);
        assert_eq!(code, 0, "{args:?}");
        let rep = assert_valid(&out);
        assert!(rep.passed && !rep.checks.is_empty());
    }
}

#[test]
fn every_suite_runs_and_validates() {
    let names = [
        "tr34",
        "esform",
        "residue",
        "symmetry",
        "commutation",
        "ybe",
        "unitarity",
        "shift",
        "assoc",
        "locality",
        "classical",
        "pbw",
        "module",
        "roundtrip",
    ];
    let mut args = vec!["verify"];
    args.extend(names);
    args.extend(["--N", "2", "--c", "1/2", "--K", "3", "--samples", "4", "--timing"]);
    let (code, out) = json_of(&args);
    assert_eq!(code, 0);
    let rep = assert_valid(&out);
    assert_eq!(rep.args, names);
    assert!(rep.timing.is_some() && rep.cache.is_some());
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["verify", "nosuch"][..],
        &["verify", "tr34", "--N", "1"],
        &["verify", "tr34", "--c", "1/0"],
        &["verify", "ybe", "--formal-C"],
        &["verify", "ybe", "--c", "1", "--formal-C"],
        &["verify", "ybe", "--caps", "z=0"],
        &["verify", "assoc", "--K", "1"],
        &["pbw-reduce", "y1(1) x"],
        &["pbw-reduce", "y1(0)", "--N", "2", "--K", "2", "--bogus"],
        &["gseries", "--N", "two"],
    ] {
        let (code, _, err) = qheis(args);
        assert_eq!(code, 1, "{args:?}: {err}");
        assert!(!err.is_empty());
    }
    let (code, _, _) = qheis(&["--help"]);
    assert_eq!(code, 0);
}

#[test]
fn verification_failure_exits_two() {
    // the exponent searches report a failure when the scan bound is too small
    let (code, out) = json_of(&["verify", "locality", "--N", "2", "--c", "1", "--K", "2", "--caps", "scan=1"]);
    assert_eq!(code, 2);
    let rep = assert_valid(&out);
    assert!(!rep.passed);
    assert!(rep.checks.iter().any(|c| c.witness.is_some()));
}

#[test]
fn reports_are_byte_identical_and_independent_of_jobs() {
    let args =
        ["verify", "commutation", "assoc", "pbw", "--N", "2", "--c", "-2", "--K", "3", "--samples", "6", "--seed", "5"];
    let (_, a) = json_of(&[&args[..], &["--jobs", "1"]].concat());
    let (_, b) = json_of(&[&args[..], &["--jobs", "1"]].concat());
    assert_eq!(a, b);
    let (_, c) = json_of(&[&args[..], &["--jobs", "3"]].concat());
    let strip = |s: &str| s.replace("\"jobs\": 3", "\"jobs\": 1");
    assert_eq!(strip(&c), a);
}

#[test]
fn cache_dir_from_flag_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let (_, out) = json_of(&["verify", "tr34", "--N", "3", "--K", "2", "--cache-dir", d, "--timing"]);
    let rep = assert_valid(&out);
    assert_eq!((rep.cache.as_ref().unwrap().hits, rep.cache.as_ref().unwrap().misses), (0, 1));
    let out = Command::new(env!("CARGO_BIN_EXE_qheis"))
        .args(["verify", "tr34", "--N", "3", "--K", "2", "--timing", "--json", "-"])
        .env("QHEIS_CACHE_DIR", d)
        .output()
        .unwrap();
    let rep = assert_valid(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rep.cache.unwrap().hits, 1);
}

#[test]
fn json_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.json");
    let (code, out, _) = qheis(&["verify", "residue", "--N", "3", "--K", "3", "--json", p.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.starts_with("PASS residue"));
    assert_valid(&std::fs::read_to_string(p).unwrap());
}
