use std::process::{Command, Output};

use cellstar::dictionary::Dictionary;
use jsonschema::JSONSchema;
use serde_json::{json, Value};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cellstar"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn schema_for(cmd: &str) -> JSONSchema {
    let text = include_str!("../../../docs/schema.json");
    let mut schema: Value = serde_json::from_str(text).unwrap();
    schema["oneOf"] = json!([{ "$ref": format!("#/definitions/{cmd}") }]);
    JSONSchema::compile(&schema).expect("schema compiles")
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["analyze", "001,100,011,110"]).status.code(), Some(0));
    assert_eq!(run(&["verify", "t,1+t"]).status.code(), Some(0));

    let violation = run(&["verify", "t,t(1+t)"]);
    assert_eq!(violation.status.code(), Some(1));
    assert!(stdout(&violation).contains("(III) doubly commuting     FAIL"));

    for bad in [
        vec!["analyze", "01,1"],
        vec!["analyze", "01,x0"],
        vec!["classify", "9"],
        vec!["classify", "1"],
        vec!["kernel", "--poly", "0"],
        vec!["certify", "t,,1"],
        vec!["verify", "t,1+t", "--level", "2"],
        vec!["ledrappier", ""],
    ] {
        let o = run(&bad);
        assert_eq!(o.status.code(), Some(2), "{bad:?}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"), "{bad:?}");
    }
}

#[test]
fn json_validates_against_schema() {
    let cases: &[&[&str]] = &[
        &["analyze", "001,100,011,110"],
        &["analyze", "000,100,010,111"],
        &["analyze", "01,10"],
        &["analyze", "00,01"],
        &["classify", "2"],
        &["classify", "4"],
        &["kernel", "001,010,100,111"],
        &["kernel", "--poly", "1+t^3"],
        &["certify", "t,1+t^2,1+t+t^2"],
        &["certify", "t,t"],
        &["certify", "t,t(1+t)"],
        &["verify", "t,1+t", "--level", "5"],
        &["verify", "t,t(1+t)", "--level", "5"],
        &["ledrappier", "1"],
        &["ledrappier", "110100"],
    ];
    for args in cases {
        let o = run(&[args, &["--json"][..]].concat());
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        let schema = schema_for(args[0]);
        let msgs: Vec<String> = match schema.validate(&v) {
            Ok(()) => Vec::new(),
            Err(errors) => errors.map(|e| format!("{e} at {}", e.instance_path)).collect(),
        };
        assert!(msgs.is_empty(), "{args:?}: {msgs:?}");
    }
}

#[test]
fn schema_rejects_wrong_shapes() {
    let schema = schema_for("classify");
    assert!(!schema.is_valid(&json!({ "window": 3 })));
    let o = run(&["classify", "3", "--json"]);
    let mut v: Value = serde_json::from_slice(&o.stdout).unwrap();
    v["admissible"][0]["dictionary"] = json!("0a1");
    assert!(!schema.is_valid(&v));
}

#[test]
fn output_is_identical_across_job_counts() {
    for n in ["3", "4", "5"] {
        let reference = stdout(&run(&["classify", n, "--json", "--jobs", "1"]));
        for jobs in ["2", "3", "8"] {
            assert_eq!(stdout(&run(&["classify", n, "--json", "--jobs", jobs])), reference);
        }
        assert_eq!(stdout(&run(&["classify", n, "--json"])), reference);
    }
}

#[test]
fn text_output_round_trips_dictionaries() {
    let text = stdout(&run(&["classify", "4", "--text"]));
    let listed: Vec<&str> = text
        .lines()
        .filter_map(|l| l.split('\t').next().filter(|s| s.contains(',')))
        .collect();
    assert_eq!(listed.len(), 8);
    for d in listed {
        let parsed: Dictionary = d.parse().unwrap();
        assert_eq!(parsed.to_string(), d);
        let again = stdout(&run(&["analyze", d]));
        assert!(again.starts_with(&format!("dictionary   {d}\n")));
        assert!(again.contains("admissible   yes"));
    }

    // any word order in, the canonical order out
    let text = stdout(&run(&["analyze", "110,011,100,001"]));
    let shown = text.lines().next().unwrap().trim_start_matches("dictionary").trim();
    assert_eq!(shown.parse::<Dictionary>().unwrap(), "001,100,011,110".parse().unwrap());
}

#[test]
fn json_and_text_flags_conflict() {
    assert_eq!(run(&["classify", "3", "--json", "--text"]).status.code(), Some(2));
}

#[test]
fn ledrappier_text() {
    let o = run(&["ledrappier", "1101"]);
    assert_eq!(
        stdout(&o),
        "1101\n011\n10\n1\nvertical step 011\nstacked orbit matches patch: true\n"
    );
}
