//! Exit codes, output determinism, and input immutability of the binary.

use std::path::Path;
use std::process::{Command, Output};

use txlog_io::validate_dot;

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/replay12.csv");

fn forsage(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_forsage"))
        .args(args)
        .output()
        .unwrap()
}

fn stderr_error_line(output: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&output.stderr);
    let line = text.lines().last().unwrap_or_default();
    serde_json::from_str(line).unwrap_or_else(|_| panic!("not a JSON error line: {text}"))
}

#[test]
fn bad_arguments_exit_2() {
    let out = forsage(&["simulate", "--arrivals", "10", "--out", "/tmp/x"]);
    assert_eq!(out.status.code(), Some(2), "seed is mandatory");

    let out = forsage(&["simulate", "--arrivals", "10", "--seed", "1", "--purchase-prob", "7", "--out", "/tmp/x"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error_line(&out)["error"], "bad-arguments");
}

#[test]
fn missing_input_exits_3() {
    let out = forsage(&["replay", "--in", "/nonexistent/log.csv"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_error_line(&out)["error"], "io-failure");
}

#[test]
fn data_errors_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("log.csv");

    // unknown function in the log
    std::fs::write(
        &log,
        "ordinal,sender,function,referrer,matrix,level,value_wei,fee_wei\n\
         1,0xaa,transfer,,,,50000000000000000,0\n",
    )
    .unwrap();
    let out = forsage(&["replay", "--in", log.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(stderr_error_line(&out)["error"], "parse-failed");

    // strict replay failure: registering under an unknown referrer
    std::fs::write(
        &log,
        "ordinal,sender,function,referrer,matrix,level,value_wei,fee_wei\n\
         1,0xaa,register,0xghost,,,50000000000000000,0\n",
    )
    .unwrap();
    let out = forsage(&["replay", "--in", log.to_str().unwrap(), "--strict"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(stderr_error_line(&out)["error"], "replay-failed");

    // lenient mode shrugs it off and reports the skip in the sidecar
    let out_dir = dir.path().join("out");
    let out = forsage(&[
        "replay",
        "--in",
        log.to_str().unwrap(),
        "--lenient",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let sidecar = std::fs::read_to_string(out_dir.join("skipped.csv")).unwrap();
    assert!(sidecar.contains("unknown-referrer"));
}

#[test]
fn analyze_and_visualize_are_deterministic_and_do_not_touch_inputs() {
    let before = std::fs::read(FIXTURE).unwrap();
    let dir = tempfile::tempdir().unwrap();

    let mut reports = Vec::new();
    for run in 0..2 {
        let report = dir.path().join(format!("report{run}.json"));
        let out = forsage(&[
            "analyze",
            "--in",
            FIXTURE,
            "--owner",
            "0xowner",
            "--top",
            "3",
            "--out",
            report.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{out:?}");
        reports.push(std::fs::read(&report).unwrap());
    }
    assert_eq!(reports[0], reports[1], "byte-identical reports");

    let dot_path = dir.path().join("tree.dot");
    let out = forsage(&[
        "visualize",
        "--in",
        FIXTURE,
        "--owner",
        "0xowner",
        "--matrix",
        "x4",
        "--level",
        "1",
        "--out",
        dot_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let dot = std::fs::read_to_string(&dot_path).unwrap();
    validate_dot(&dot).unwrap();
    assert!(dot.contains("digraph x4_level_1"));

    // focus on a subtree
    let out = forsage(&[
        "visualize",
        "--in",
        FIXTURE,
        "--owner",
        "0xowner",
        "--matrix",
        "x3",
        "--level",
        "1",
        "--focus",
        "0xa",
        "--out",
        dot_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");

    assert_eq!(std::fs::read(FIXTURE).unwrap(), before, "input untouched");
}

#[test]
fn simulate_zero_arrivals_writes_an_empty_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("empty");
    let out = forsage(&[
        "simulate",
        "--arrivals",
        "0",
        "--seed",
        "1",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let schedule = std::fs::read_to_string(out_dir.join("schedule.csv")).unwrap();
    assert_eq!(
        schedule,
        "ordinal,sender,function,referrer,matrix,level,value_wei,fee_wei\n"
    );
}

#[test]
fn simulate_models_and_fee_flags_work_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    for (model, fee_model) in [("chain", "constant"), ("preferential", "lognormal"), ("uniform", "lognormal")] {
        let out_dir = dir.path().join(model);
        let out = forsage(&[
            "simulate",
            "--arrivals",
            "50",
            "--seed",
            "9",
            "--model",
            model,
            "--purchase-prob",
            "0.5",
            "--max-level",
            "4",
            "--fee-model",
            fee_model,
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{model}: {out:?}");
        for file in ["schedule.csv", "events.csv", "report.json", "digest.txt"] {
            assert!(Path::new(&out_dir.join(file)).exists(), "{model}/{file}");
        }
        let digest_file = std::fs::read_to_string(out_dir.join("digest.txt")).unwrap();
        let stdout = String::from_utf8(out.stdout).unwrap();
        assert_eq!(digest_file.trim(), stdout.trim());
    }
}
