use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn finmono(args: &[&str]) -> Output {
    // shared, so reports from separate runs can be compared byte for byte
    let cache = Path::new(env!("CARGO_TARGET_TMPDIR")).join("field-cache");
    Command::new(env!("CARGO_BIN_EXE_finmono"))
        .args(args)
        .env("FINMONO_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn records(out: &Output) -> Vec<Value> {
    text(out)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn text(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn kind(r: &Value) -> &str {
    r["record"].as_str().unwrap()
}

#[test]
fn check_of_the_two_parameter_system_passes() {
    let out = finmono(&[
        "check",
        "--p",
        "3",
        "--D",
        "23",
        "--d",
        "1,5",
        "--twist",
        "quadratic",
        "--f-max",
        "6",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let recs = records(&out);
    assert_eq!(kind(&recs[0]), "meta");
    assert_eq!(recs[0]["version"], finmono::VERSION);
    assert_eq!(
        recs[0]["config"]["command"]["system"]["d"],
        serde_json::json!([1, 5])
    );
    let verdicts: Vec<&Value> = recs.iter().filter(|r| kind(r) == "verdict").collect();
    assert_eq!(verdicts.len(), 7);
    assert!(verdicts.iter().all(|v| v["verdict"] == "PASS"));
}

#[test]
fn failing_check_exits_one_with_witnesses() {
    let out = finmono(&[
        "check",
        "--p",
        "3",
        "--D",
        "8",
        "--twist",
        "trivial",
        "--f-max",
        "2",
        "--witness-cap",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let recs = records(&out);
    let witnesses: Vec<&Value> = recs.iter().filter(|r| kind(r) == "witness").collect();
    assert_eq!(witnesses.len(), 1);
    assert_eq!(witnesses[0]["f"], 2);
    assert!(witnesses[0]["lhs"].as_i64() > witnesses[0]["rhs"].as_i64());
    assert_eq!(recs.last().unwrap()["verdict"], "FAIL");
}

#[test]
fn every_criterion_agrees_on_a_small_system() {
    for criterion in ["digit", "v", "gauss"] {
        let out = finmono(&[
            "check",
            "--p",
            "3",
            "--D",
            "8",
            "--twist",
            "trivial",
            "--f-max",
            "3",
            "--criterion",
            criterion,
        ]);
        assert_eq!(out.status.code(), Some(1), "{criterion}");
    }
    let out = finmono(&[
        "check",
        "--p",
        "3",
        "--D",
        "23",
        "--d",
        "1,5",
        "--criterion",
        "absolute",
        "--slack",
        "2",
        "--f-max",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn trace_csv_over_f81_has_the_expected_support() {
    let out = finmono(&[
        "traces",
        "--p",
        "3",
        "--D",
        "23",
        "--d",
        "1",
        "--twist",
        "quadratic",
        "--field",
        "3^4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# meta: {"));
    let mut body = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(body.next(), Some("t1,trace"));
    let values: Vec<i64> = body
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(values.len(), 81);
    let support: BTreeSet<i64> = values.into_iter().collect();
    assert_eq!(support, (-2..=3).collect());
}

#[test]
fn trace_json_rows_match_the_csv() {
    let args = ["traces", "--p", "3", "--D", "23", "--field", "3^2"];
    let csv = String::from_utf8(finmono(&args).stdout).unwrap();
    let csv_values: Vec<String> = csv
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().to_string())
        .collect();
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    let recs = records(&finmono(&json_args));
    let json_values: Vec<String> = recs
        .iter()
        .filter(|r| kind(r) == "trace_row")
        .map(|r| r["trace"].to_string())
        .collect();
    assert_eq!(csv_values, json_values);
}

#[test]
fn search_flags_23_as_not_known() {
    let out = finmono(&[
        "search",
        "--p",
        "3",
        "--D-min",
        "2",
        "--D-max",
        "60",
        "--twist",
        "quadratic",
        "--f-max",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let recs = records(&out);
    let survivor = recs
        .iter()
        .find(|r| kind(r) == "survivor" && r["D"] == 23)
        .expect("23 survives");
    assert_eq!(survivor["note"], "not a known case");
    assert_eq!(survivor["status"], "candidate (all f <= 5)");
    let d17 = recs
        .iter()
        .find(|r| kind(r) == "survivor" && r["D"] == 17)
        .unwrap();
    assert_eq!(d17["known_case"], true);
}

#[test]
fn reports_are_deterministic_across_thread_counts() {
    let args = ["search", "--p", "5", "--D-max", "60", "--f-max", "4"];
    let one = finmono(&[&args[..], &["--jobs", "1"]].concat());
    let many = finmono(&[&args[..], &["--jobs", "4"]].concat());
    let again = finmono(&[&args[..], &["--jobs", "4"]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(text(&one), text(&many));
    assert_eq!(text(&many), text(&again));

    let trace = [
        "traces", "--p", "3", "--D", "23", "--d", "1,5", "--field", "3^3",
    ];
    let a = finmono(&[&trace[..], &["--jobs", "1"]].concat());
    let b = finmono(&[&trace[..], &["--jobs", "3"]].concat());
    assert_eq!(text(&a), text(&b));
}

#[test]
fn prove_passes_on_defaults() {
    let out = finmono(&["prove"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let recs = records(&out);
    // base cases, four lemmas, f = 5 and 6, summary
    assert_eq!(recs.iter().filter(|r| kind(r) == "verdict").count(), 8);
}

#[test]
fn sampled_prove_is_reproducible() {
    let args = ["prove", "--f", "9", "--samples", "2000", "--seed", "7"];
    let a = finmono(&args);
    let b = finmono(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(text(&a), text(&b));
    let recs = records(&a);
    let sampled = recs.iter().find(|r| r["id"] == "induction step").unwrap();
    assert_eq!(sampled["mode"]["sampled"]["seed"], 7);
    assert_eq!(sampled["pairs_checked"], 2000);
}

#[test]
fn mellin_identity_holds_over_f9() {
    let out = finmono(&[
        "mellin", "--p", "3", "--D", "5", "--d", "1,2", "--twist", "trivial", "--field", "3^2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let last = records(&out).pop().unwrap();
    assert_eq!(last["tuples_checked"], 512);
    assert_eq!(last["mismatches"], 0);
}

#[test]
fn budget_refusal_exits_three() {
    let out = finmono(&[
        "check", "--p", "3", "--D", "23", "--d", "1,5", "--f-max", "10",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let out = finmono(&[
        "traces", "--p", "3", "--D", "23", "--field", "3^4", "--budget", "100",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let out = finmono(&["prove", "--f", "13"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["check", "--p", "3"][..],
        &["check", "--p", "4", "--D", "23"],
        &["check", "--p", "3", "--D", "23", "--twist", "cubic"],
        &["check", "--p", "3", "--D", "23", "--d", "2,5"],
        &["traces", "--p", "3", "--D", "23", "--field", "5^2"],
        &["traces", "--p", "3", "--D", "23", "--field", "81"],
        &["check", "--p", "3", "--D", "23", "--format", "csv"],
        &["frobnicate"],
    ] {
        let out = finmono(args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}
