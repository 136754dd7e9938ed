//! Process-level checks of the binary: exit codes and the
//! machine-parseable `error:<category>:` stderr contract.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_enviroclass"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stderr_line(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr)
        .lines()
        .next()
        .unwrap_or_default()
        .to_string()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.conf");
    fs::write(&path, body).unwrap();
    path.display().to_string()
}

#[test]
fn missing_input_file_fails_with_io_category_and_path() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "air_csv = nowhere/air.csv\n");
    let output = run(&["--config", &config, "ingest"], dir.path());
    assert!(!output.status.success());
    let line = stderr_line(&output);
    assert!(line.starts_with("error:io:"), "stderr: {line}");
    assert!(line.contains("nowhere/air.csv"), "stderr: {line}");
}

#[test]
fn unknown_config_key_fails_with_config_category() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "no_such_key = 1\n");
    let output = run(&["--config", &config, "ingest"], dir.path());
    assert!(!output.status.success());
    assert!(stderr_line(&output).starts_with("error:config:"));
}

#[test]
fn disjoint_states_fail_with_no_overlap_category() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("air.csv"),
        "state,location,so2,no2,rspm,spm\nNorth,L,5.0,,,\n",
    )
    .unwrap();
    fs::write(
        dir.path().join("water.csv"),
        "STATE,LOCATIONS,D.O. (mg/l),PH,CONDUCTIVITY (µmhos/cm),B.O.D. (mg/l),NITRATENAN N+ NITRITENANN (mg/l),FECAL COLIFORM (MPN/100ml),TOTAL COLIFORM (MPN/100ml)Mean\nSouth,W,6.0,7.0,,,,,\n",
    )
    .unwrap();
    let output = run(&["ingest"], dir.path());
    assert!(!output.status.success());
    assert!(stderr_line(&output).starts_with("error:no-overlap:"));
}

#[test]
fn renamed_column_fails_with_schema_category() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("air.csv"),
        "state,location,sulphur,no2,rspm,spm\nA,L,5.0,,,\n",
    )
    .unwrap();
    fs::write(dir.path().join("water.csv"), "x\n").unwrap();
    let output = run(&["ingest"], dir.path());
    assert!(!output.status.success());
    let line = stderr_line(&output);
    assert!(line.starts_with("error:schema:"), "stderr: {line}");
    assert!(line.contains("so2"), "stderr: {line}");
}

#[test]
fn too_many_folds_fail_with_domain_category() {
    let dir = tempfile::tempdir().unwrap();
    let status = run(&["--seed", "3", "synth", "--rows", "4"], dir.path());
    assert!(status.status.success());
    let config = write_config(
        dir.path(),
        "air_csv = synth_air.csv\nwater_csv = synth_water.csv\n",
    );
    let output = run(&["--config", &config, "train"], dir.path());
    assert!(!output.status.success());
    assert!(stderr_line(&output).starts_with("error:domain:"));
}

#[test]
fn corrupt_model_fails_with_model_format_category() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("model.json"), "{broken").unwrap();
    fs::write(dir.path().join("input.csv"), "state\n").unwrap();
    let output = run(
        &["predict", "--model", "model.json", "--input", "input.csv"],
        dir.path(),
    );
    assert!(!output.status.success());
    let line = stderr_line(&output);
    assert!(line.starts_with("error:model-format:"), "stderr: {line}");
    assert!(line.contains("format_version"), "stderr: {line}");
}

#[test]
fn dump_tables_succeeds_and_writes_three_files() {
    let dir = tempfile::tempdir().unwrap();
    let output = run(&["dump-tables"], dir.path());
    assert!(output.status.success());
    for name in ["aqi_breakpoints.csv", "wqi_parameters.csv", "label_table.csv"] {
        assert!(dir.path().join(name).exists(), "{name} missing");
    }
}

#[test]
fn synth_zero_rows_succeeds_with_header_only_files() {
    let dir = tempfile::tempdir().unwrap();
    let output = run(&["synth", "--rows", "0"], dir.path());
    assert!(output.status.success());
    let air = fs::read_to_string(dir.path().join("synth_air.csv")).unwrap();
    assert_eq!(air.lines().count(), 1);
}

#[test]
fn seed_flag_overrides_config_seed() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "seed = 1\n");
    run(&["--config", &config, "--out", "a", "--seed", "9", "synth", "--rows", "30"], dir.path());
    run(&["--config", &config, "--out", "b", "--seed", "9", "synth", "--rows", "30"], dir.path());
    run(&["--config", &config, "--out", "c", "synth", "--rows", "30"], dir.path());
    let a = fs::read_to_string(dir.path().join("a/synth_air.csv")).unwrap();
    let b = fs::read_to_string(dir.path().join("b/synth_air.csv")).unwrap();
    let c = fs::read_to_string(dir.path().join("c/synth_air.csv")).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}
