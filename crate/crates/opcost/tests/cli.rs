//! End-to-end checks of the installed binary: exit codes, stream
//! discipline, and configuration precedence.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn corpus_file(name: &str) -> String {
    corpus().join(name).to_str().expect("utf-8 path").to_owned()
}

struct Run {
    status: i32,
    stdout: String,
    stderr: String,
}

/// Runs the binary with a scrubbed OPCOST_ environment plus `envs`.
fn opcost_in(dir: &Path, envs: &[(&str, &str)], args: &[&str]) -> Run {
    let mut command = Command::new(env!("CARGO_BIN_EXE_opcost"));
    command.args(args).current_dir(dir);
    for (key, _) in std::env::vars() {
        if key.starts_with("OPCOST_") {
            command.env_remove(key);
        }
    }
    for (key, value) in envs {
        command.env(key, value);
    }
    let output = command.output().expect("binary runs");
    Run {
        status: output.status.code().expect("exited normally"),
        stdout: String::from_utf8(output.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(output.stderr).expect("utf-8 stderr"),
    }
}

fn opcost(envs: &[(&str, &str)], args: &[&str]) -> Run {
    opcost_in(Path::new(env!("CARGO_MANIFEST_DIR")), envs, args)
}

fn assert_clean_success(run: &Run) {
    assert_eq!(run.status, 0, "stderr: {}", run.stderr);
    assert!(
        run.stderr.lines().all(|line| line.starts_with("warning:")),
        "non-warning stderr on success: {}",
        run.stderr
    );
}

fn assert_failure(run: &Run, code: i32) {
    assert_eq!(run.status, code, "stderr: {}", run.stderr);
    assert!(
        !run.stderr.trim().is_empty(),
        "exit {code} without a diagnostic"
    );
    assert!(
        run.stdout.is_empty(),
        "failed run wrote to stdout: {}",
        run.stdout
    );
}

#[test]
fn analyze_happy_path_emits_json() {
    let file = corpus_file("sum_loop.ll");
    let run = opcost(
        &[],
        &[
            "analyze",
            &file,
            "--arch",
            "x86_64",
            "--profile",
            "RESEARCH",
            "--format",
            "json",
        ],
    );
    assert_clean_success(&run);
    assert!(run.stdout.contains("\"schema_version\": \"1\""));
    assert!(run.stdout.contains("sum_loop.ll::sum_n"));
}

#[test]
fn text_header_reflects_the_defaults() {
    let file = corpus_file("pipeline.py");
    let run = opcost(&[], &["analyze", &file]);
    assert_clean_success(&run);
    let header = run.stdout.lines().next().expect("nonempty report");
    assert!(header.contains("architecture x86_64"), "{header}");
    assert!(header.contains("profile RESEARCH"), "{header}");
    assert!(header.contains("cohort functions"), "{header}");
}

#[test]
fn unknown_profile_exits_1_listing_builtins() {
    let dir = corpus();
    let run = opcost(
        &[],
        &["batch", dir.to_str().unwrap(), "--profile", "NOSUCH"],
    );
    assert_failure(&run, 1);
    for name in ["RESEARCH", "COMMERCIAL", "MOBILE", "HPC"] {
        assert!(run.stderr.contains(name), "missing {name}: {}", run.stderr);
    }
}

#[test]
fn explicit_research_weights_match_the_named_profile() {
    let file = corpus_file("search.py");
    let named = opcost(
        &[],
        &[
            "analyze",
            &file,
            "--profile",
            "RESEARCH",
            "--format",
            "json",
        ],
    );
    let weighted = opcost(
        &[],
        &[
            "analyze",
            &file,
            "--weights",
            "0.4,0.3,0.25,0.05",
            "--format",
            "json",
        ],
    );
    assert_clean_success(&named);
    assert_clean_success(&weighted);
    assert_eq!(named.stdout, weighted.stdout);
}

#[test]
fn usage_errors_exit_1() {
    let file = corpus_file("pipeline.py");
    for args in [
        vec!["analyze", &file, "--bogus-flag"],
        vec![
            "analyze",
            &file,
            "--profile",
            "HPC",
            "--weights",
            "0.25,0.25,0.25,0.25",
        ],
        vec!["analyze", &file, "--weights", "0.5,0.5,0.5,0.5"],
        vec!["analyze", &file, "--format", "yaml"],
        vec!["analyze", &file, "--cohort", "modules"],
    ] {
        let run = opcost(&[], &args);
        assert_failure(&run, 1);
    }
}

#[test]
fn parse_errors_exit_2_and_name_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("broken.py");
    fs::write(&bad, "def broken(:\n").unwrap();
    let run = opcost(&[], &["analyze", bad.to_str().unwrap()]);
    assert_failure(&run, 2);
    assert!(run.stderr.contains("broken.py"), "{}", run.stderr);
}

#[test]
fn io_errors_exit_3() {
    let missing = opcost(&[], &["analyze", "definitely_missing.ll"]);
    assert_failure(&missing, 3);

    let file = corpus_file("pipeline.py");
    let table = opcost(
        &[],
        &["analyze", &file, "--cost-table", "/no/such/table.json"],
    );
    assert_failure(&table, 3);

    let config = opcost(&[], &["analyze", &file, "--config", "/no/such/opcost.json"]);
    assert_failure(&config, 3);
}

#[test]
fn env_overrides_defaults_and_flags_override_env() {
    let file = corpus_file("pipeline.py");
    let from_env = opcost(&[("OPCOST_PROFILE", "MOBILE")], &["analyze", &file]);
    assert_clean_success(&from_env);
    assert!(from_env
        .stdout
        .lines()
        .next()
        .unwrap()
        .contains("profile MOBILE"));

    let from_flag = opcost(
        &[("OPCOST_PROFILE", "MOBILE")],
        &["analyze", &file, "--profile", "HPC"],
    );
    assert_clean_success(&from_flag);
    assert!(from_flag
        .stdout
        .lines()
        .next()
        .unwrap()
        .contains("profile HPC"));
}

#[test]
fn config_file_sits_below_env_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("opcost.json"),
        r#"{"profile": "COMMERCIAL"}"#,
    )
    .unwrap();
    let file = corpus_file("pipeline.py");

    let from_file = opcost_in(dir.path(), &[], &["analyze", &file]);
    assert_clean_success(&from_file);
    assert!(from_file
        .stdout
        .lines()
        .next()
        .unwrap()
        .contains("profile COMMERCIAL"));

    let from_env = opcost_in(
        dir.path(),
        &[("OPCOST_PROFILE", "MOBILE")],
        &["analyze", &file],
    );
    assert_clean_success(&from_env);
    assert!(from_env
        .stdout
        .lines()
        .next()
        .unwrap()
        .contains("profile MOBILE"));

    let explicit = dir.path().join("other.json");
    fs::write(&explicit, r#"{"seed": 7, "profile": "HPC"}"#).unwrap();
    let from_explicit = opcost(
        &[],
        &["analyze", &file, "--config", explicit.to_str().unwrap()],
    );
    assert_clean_success(&from_explicit);
    assert!(from_explicit
        .stdout
        .lines()
        .next()
        .unwrap()
        .contains("profile HPC"));
}

#[test]
fn output_flag_writes_the_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let file = corpus_file("search.py");
    let to_file = opcost(
        &[],
        &[
            "analyze",
            &file,
            "--format",
            "json",
            "--output",
            out.to_str().unwrap(),
        ],
    );
    assert_clean_success(&to_file);
    assert!(to_file.stdout.is_empty());

    let to_stdout = opcost(&[], &["analyze", &file, "--format", "json"]);
    assert_eq!(fs::read_to_string(&out).unwrap(), to_stdout.stdout);
}

#[test]
fn grid_csv_export_has_the_expected_header() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("grid.csv");
    let root = corpus();
    let run = opcost(
        &[],
        &[
            "grid",
            root.to_str().unwrap(),
            "--grid",
            "3x3",
            "--csv",
            csv.to_str().unwrap(),
        ],
    );
    assert_clean_success(&run);
    let text = fs::read_to_string(&csv).unwrap();
    assert!(
        text.starts_with("eu_scale,price_scale,usd_leader,composite_leader\n"),
        "{text}"
    );
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn validate_text_mode_summarizes_the_study() {
    let run = opcost(&[], &["validate", "--seed", "5"]);
    assert_clean_success(&run);
    assert!(run.stdout.contains("MODEL"));
    assert!(run.stdout.contains("B1"));
}

#[test]
fn sweep_reports_unknown_artifacts_as_usage_errors() {
    let file = corpus_file("sum_loop.ll");
    let run = opcost(
        &[],
        &["sweep", &file, "sum_loop.ll::sum_n", "sum_loop.ll::missing"],
    );
    assert_failure(&run, 1);
    assert!(run.stderr.contains("known ids"), "{}", run.stderr);
}
