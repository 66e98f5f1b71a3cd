//! End-to-end contract tests for the `ewaf` binary: determinism, exit codes,
//! config-file precedence, and output shapes.

use std::process::{Command, Output};

fn ewaf() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ewaf"))
}

fn run_ok(args: &[&str]) -> Output {
    let output = ewaf().args(args).output().expect("binary runs");
    assert!(
        output.status.success(),
        "expected success, got {:?}\nstderr: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stderr)
    );
    output
}

fn base_args<'a>(out: &'a str, format: &'a str) -> Vec<&'a str> {
    vec![
        "--experts",
        "3",
        "--horizon",
        "40",
        "--schedule",
        "paper",
        "--loss",
        "abs",
        "--adversary",
        "bernoulli:0.5",
        "--advice",
        "walk:0.2",
        "--seed",
        "42",
        "--verify",
        "--format",
        format,
        "--out",
        out,
    ]
}

#[test]
fn same_config_and_seed_yield_byte_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.csv");
    let second = dir.path().join("b.csv");
    run_ok(&base_args(first.to_str().unwrap(), "csv"));
    run_ok(&base_args(second.to_str().unwrap(), "csv"));
    let a = std::fs::read(&first).unwrap();
    let b = std::fs::read(&second).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn same_config_and_seed_yield_byte_identical_json() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.json");
    let second = dir.path().join("b.json");
    run_ok(&base_args(first.to_str().unwrap(), "json"));
    run_ok(&base_args(second.to_str().unwrap(), "json"));
    let a = std::fs::read(&first).unwrap();
    let b = std::fs::read(&second).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);

    // And the document is well-formed with all sections present.
    let doc: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(doc["config"]["seed"], 42);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 40);
    assert!(doc["bound_report"]["violation"].as_bool() == Some(false));
    assert!(doc["ledger_summary"]["rounds"].as_u64() == Some(40));
}

#[test]
fn increasing_custom_schedule_exits_with_config_code_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let rates = dir.path().join("rates.txt");
    std::fs::write(&rates, "0.4\n0.5\n0.6\n").unwrap();
    let out = dir.path().join("never.csv");
    let schedule = format!("custom:{}", rates.display());
    let output = ewaf()
        .args([
            "--experts",
            "2",
            "--horizon",
            "3",
            "--schedule",
            &schedule,
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(!out.exists(), "no output may be written on config errors");
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("increases"), "stderr was: {stderr}");
}

#[test]
fn missing_required_keys_exit_with_config_code() {
    let output = ewaf().args(["--horizon", "10"]).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn unknown_flag_values_exit_with_config_code() {
    let output = ewaf()
        .args(["--experts", "2", "--horizon", "3", "--loss", "hinge"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn csv_run_emits_header_plus_one_row_per_round() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    run_ok(&base_args(out.to_str().unwrap(), "csv"));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 41);
    assert!(lines[0].starts_with("t,eta,prediction,outcome,"));
    assert!(lines[0].ends_with(",regret,regret_bound,ledger_mass"));
}

#[test]
fn flags_override_config_file_entries() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.conf");
    std::fs::write(
        &config,
        "experts = 2\nhorizon = 20\nschedule = constant:0.5\nadvice = constant:0.1,0.9\n\
         adversary = bernoulli:0.3\nseed = 1\nformat = csv\n",
    )
    .unwrap();

    // Run once from the file alone, once with a flag override of the seed.
    let from_file = dir.path().join("file.csv");
    run_ok(&[
        "--config",
        config.to_str().unwrap(),
        "--out",
        from_file.to_str().unwrap(),
    ]);
    let overridden = dir.path().join("override.csv");
    run_ok(&[
        "--config",
        config.to_str().unwrap(),
        "--seed",
        "2",
        "--out",
        overridden.to_str().unwrap(),
    ]);
    // A direct run with seed 2 must match the overridden run exactly.
    let direct = dir.path().join("direct.csv");
    run_ok(&[
        "--experts",
        "2",
        "--horizon",
        "20",
        "--schedule",
        "constant:0.5",
        "--advice",
        "constant:0.1,0.9",
        "--adversary",
        "bernoulli:0.3",
        "--seed",
        "2",
        "--format",
        "csv",
        "--out",
        direct.to_str().unwrap(),
    ]);
    let file_bytes = std::fs::read(&from_file).unwrap();
    let override_bytes = std::fs::read(&overridden).unwrap();
    let direct_bytes = std::fs::read(&direct).unwrap();
    assert_eq!(override_bytes, direct_bytes);
    assert_ne!(file_bytes, override_bytes);
}

#[test]
fn relative_out_paths_resolve_against_the_env_dir() {
    let dir = tempfile::tempdir().unwrap();
    let output = ewaf()
        .args(base_args("run.csv", "csv"))
        .env("EWAF_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(output.status.success());
    assert!(dir.path().join("run.csv").exists());
}

#[test]
fn bound_table_covers_the_grid_with_dominance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("table.csv");
    run_ok(&[
        "--bound-table",
        "--experts",
        "2,8",
        "--horizon",
        "10,1000",
        "--schedule",
        "paper",
        "--out",
        out.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5, "header plus 4 grid rows");
    for line in &lines[1..] {
        let ratio: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(
            ratio > 1.0,
            "decaying schedules separate the bounds: {line}"
        );
    }
}

#[test]
fn bound_table_constant_rows_have_unit_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("table.csv");
    run_ok(&[
        "--bound-table",
        "--experts",
        "2",
        "--horizon",
        "10,100",
        "--schedule",
        "constant:0.5,paper",
        "--out",
        out.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&out).unwrap();
    for line in text.lines().skip(1).filter(|l| l.starts_with("constant")) {
        let ratio: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((ratio - 1.0).abs() <= 1e-12);
    }
    // Both schedules appear.
    assert!(text.lines().any(|l| l.starts_with("paper,")));
}

#[test]
fn stdout_is_used_when_no_out_path_is_given() {
    let output = ewaf()
        .args([
            "--experts",
            "2",
            "--horizon",
            "5",
            "--adversary",
            "adaptive",
            "--advice",
            "constant:0,1",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn fixed_scripts_from_files_drive_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let outcomes = dir.path().join("ys.txt");
    std::fs::write(&outcomes, "1 0 1 0 1\n").unwrap();
    let advice = dir.path().join("advice.txt");
    std::fs::write(&advice, "0.0,1.0\n0.1,0.9\n0.2,0.8\n0.3,0.7\n0.4,0.6\n").unwrap();
    let out = dir.path().join("run.csv");
    let adversary = format!("fixed:{}", outcomes.display());
    let advice_spec = format!("fixed:{}", advice.display());
    run_ok(&[
        "--experts",
        "2",
        "--horizon",
        "5",
        "--schedule",
        "cbl",
        "--adversary",
        &adversary,
        "--advice",
        &advice_spec,
        "--verify",
        "--out",
        out.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 6);
    // Outcomes in the trajectory echo the script.
    let outcomes: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap())
        .collect();
    assert!(outcomes[0].starts_with("1."));
    assert!(outcomes[1].starts_with("0."));
}
