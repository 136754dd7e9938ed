//! End-to-end pipeline tests over hand-built fixtures: golden ingest
//! output, label assignment through the index and rule-table path, and
//! self-consistency between the run report and the emitted predictions.

use std::fs;
use std::path::Path;

use enviroclass::cli::commands::{
    cmd_dump_tables, cmd_ingest, cmd_label, cmd_predict, cmd_rank_features, cmd_synth, cmd_train,
};
use enviroclass::cli::config::RunConfig;
use enviroclass::cli::csvio::read_matrix_csv;
use enviroclass::eval::accuracy;
use enviroclass::ingest::{AIR_FIELDS, WATER_FIELDS};
use enviroclass::labeler::EnvLabel;

const AIR_FIXTURE: &str = "\
state,location,so2,no2,rspm,spm
Alpha,A1,20.0,,75.0,
Beta ,B1,10.0,5.0,,
Gamma,G1,1.0,,,
";

const WATER_FIXTURE: &str = "\
STATE,LOCATIONS,D.O. (mg/l),PH,CONDUCTIVITY (µmhos/cm),B.O.D. (mg/l),NITRATENAN N+ NITRITENANN (mg/l),FECAL COLIFORM (MPN/100ml),TOTAL COLIFORM (MPN/100ml)Mean
ALPHA,W1,14.6,7.0,0,0,0,0,0
alpha,W2,14.6,7.0,100,2.0,,,
Beta,W3,6.0,8.0,500,4.0,20,150,800
";

/// Hand-derived from the fixture: alpha means over two records, beta a
/// single record, gamma dropped (no water data).
const GOLDEN_JOINED: &str = "\
state,so2,no2,rspm,spm,do,ph,conductivity,bod,nitrate,fecal_coliform,total_coliform
alpha,20.0000000,,75.0000000,,14.6000000,7.00000000,50.0000000,1.00000000,0.00000000,0.00000000,0.00000000
beta,10.0000000,5.00000000,,,6.00000000,8.00000000,500.000000,4.00000000,20.0000000,150.000000,800.000000
";

fn fixture_config(dir: &Path) -> RunConfig {
    let air = dir.join("air.csv");
    let water = dir.join("water.csv");
    fs::write(&air, AIR_FIXTURE).unwrap();
    fs::write(&water, WATER_FIXTURE).unwrap();
    RunConfig {
        air_csv: air,
        water_csv: water,
        out_dir: dir.to_path_buf(),
        ..RunConfig::default()
    }
}

fn feature_names() -> Vec<String> {
    AIR_FIELDS
        .iter()
        .chain(WATER_FIELDS.iter())
        .map(|s| s.to_string())
        .collect()
}

#[test]
fn ingest_matches_golden_output() {
    let dir = tempfile::tempdir().unwrap();
    let config = fixture_config(dir.path());
    cmd_ingest(&config).unwrap();
    let joined = fs::read_to_string(dir.path().join("joined.csv")).unwrap();
    assert_eq!(joined, GOLDEN_JOINED);
}

#[test]
fn ingest_is_byte_deterministic() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    cmd_ingest(&fixture_config(dir_a.path())).unwrap();
    cmd_ingest(&fixture_config(dir_b.path())).unwrap();
    assert_eq!(
        fs::read(dir_a.path().join("joined.csv")).unwrap(),
        fs::read(dir_b.path().join("joined.csv")).unwrap()
    );
}

#[test]
fn labels_run_through_indices_and_rule_table() {
    let dir = tempfile::tempdir().unwrap();
    let config = fixture_config(dir.path());
    cmd_label(&config).unwrap();
    let matrix = read_matrix_csv(&dir.path().join("labeled.csv"), &feature_names()).unwrap();
    // alpha: air index 75 (Satisfactory) with a near-ideal water index
    //        (Excellent) combines to Satisfactory via the fill formula;
    // beta: air Good with water Poor hits the pinned Fair cell.
    assert_eq!(matrix.state_keys, vec!["alpha", "beta"]);
    assert_eq!(
        matrix.labels.unwrap(),
        vec![EnvLabel::Satisfactory, EnvLabel::Fair]
    );
}

#[test]
fn empty_but_valid_inputs_produce_empty_join() {
    let dir = tempfile::tempdir().unwrap();
    let air = dir.path().join("air.csv");
    let water = dir.path().join("water.csv");
    fs::write(&air, "state,location,so2,no2,rspm,spm\n").unwrap();
    fs::write(
        &water,
        "STATE,LOCATIONS,D.O. (mg/l),PH,CONDUCTIVITY (µmhos/cm),B.O.D. (mg/l),NITRATENAN N+ NITRITENANN (mg/l),FECAL COLIFORM (MPN/100ml),TOTAL COLIFORM (MPN/100ml)Mean\n",
    )
    .unwrap();
    let config = RunConfig {
        air_csv: air,
        water_csv: water,
        out_dir: dir.path().to_path_buf(),
        ..RunConfig::default()
    };
    cmd_ingest(&config).unwrap();
    let joined = fs::read_to_string(dir.path().join("joined.csv")).unwrap();
    assert_eq!(joined.lines().count(), 1);

    cmd_label(&config).unwrap();
    let labeled = fs::read_to_string(dir.path().join("labeled.csv")).unwrap();
    assert_eq!(labeled.lines().count(), 1);
    assert!(labeled.trim_end().ends_with(",label"));
}

fn trained_synth_dir() -> (tempfile::TempDir, RunConfig) {
    let dir = tempfile::tempdir().unwrap();
    cmd_synth(dir.path(), 150, 5).unwrap();
    let config = RunConfig {
        air_csv: dir.path().join("synth_air.csv"),
        water_csv: dir.path().join("synth_water.csv"),
        out_dir: dir.path().to_path_buf(),
        seed: 5,
        ..RunConfig::default()
    };
    cmd_label(&config).unwrap();
    cmd_train(&config).unwrap();
    (dir, config)
}

#[test]
fn report_accuracy_matches_emitted_predictions() {
    let (dir, _) = trained_synth_dir();

    let mut reader = csv::Reader::from_path(dir.path().join("test_predictions.csv")).unwrap();
    let mut actual = Vec::new();
    let mut predicted = Vec::new();
    for record in reader.records() {
        let record = record.unwrap();
        actual.push(record[1].parse::<EnvLabel>().unwrap());
        predicted.push(record[2].parse::<EnvLabel>().unwrap());
    }
    let recomputed = accuracy(&predicted, &actual).unwrap();

    let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    let reported: f64 = report
        .lines()
        .find_map(|l| l.strip_prefix("test_accuracy = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(
        (recomputed - reported).abs() < 1e-8,
        "report says {reported}, predictions give {recomputed}"
    );
}

#[test]
fn predict_on_training_data_agrees_with_labels() {
    let (dir, _) = trained_synth_dir();
    cmd_predict(
        dir.path(),
        &dir.path().join("model.json"),
        &dir.path().join("labeled.csv"),
    )
    .unwrap();

    let labeled = read_matrix_csv(&dir.path().join("labeled.csv"), &feature_names()).unwrap();
    let mut reader = csv::Reader::from_path(dir.path().join("predictions.csv")).unwrap();
    let predicted: Vec<EnvLabel> = reader
        .records()
        .map(|r| r.unwrap()[1].parse::<EnvLabel>().unwrap())
        .collect();
    let acc = accuracy(&predicted, labeled.labels.as_ref().unwrap()).unwrap();
    assert!(acc >= 0.95, "prediction accuracy on labeled data {acc}");
}

#[test]
fn predict_on_header_only_input_writes_header_only_output() {
    let (dir, _) = trained_synth_dir();
    let empty = dir.path().join("empty.csv");
    let mut header = vec!["state".to_string()];
    header.extend(feature_names());
    fs::write(&empty, format!("{}\n", header.join(","))).unwrap();
    cmd_predict(dir.path(), &dir.path().join("model.json"), &empty).unwrap();
    let predictions = fs::read_to_string(dir.path().join("predictions.csv")).unwrap();
    assert_eq!(predictions.lines().count(), 1);
    assert!(predictions.starts_with("state,label,p_good"));
}

#[test]
fn rank_features_writes_sorted_ranking() {
    let dir = tempfile::tempdir().unwrap();
    cmd_synth(dir.path(), 180, 3).unwrap();
    let config = RunConfig {
        air_csv: dir.path().join("synth_air.csv"),
        water_csv: dir.path().join("synth_water.csv"),
        out_dir: dir.path().to_path_buf(),
        seed: 3,
        ..RunConfig::default()
    };
    cmd_rank_features(&config).unwrap();

    let mut reader = csv::Reader::from_path(dir.path().join("feature_ranking.csv")).unwrap();
    assert_eq!(
        reader.headers().unwrap(),
        &csv::StringRecord::from(vec!["feature", "pearson_r", "note"])
    );
    let coefficients: Vec<(String, f64)> = reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].to_string(), r[1].parse::<f64>().unwrap())
        })
        .collect();
    assert_eq!(coefficients.len(), 11);
    for pair in coefficients.windows(2) {
        assert!(pair[0].1.abs() >= pair[1].1.abs() - 1e-12);
    }
    // low oxygen accompanies bad environments in the generated data
    let (_, r_do) = coefficients.iter().find(|(n, _)| n == "do").unwrap();
    assert!(*r_do < 0.0);
}

#[test]
fn dump_tables_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    cmd_dump_tables(dir.path()).unwrap();
    let first: Vec<Vec<u8>> = ["aqi_breakpoints.csv", "wqi_parameters.csv", "label_table.csv"]
        .iter()
        .map(|name| fs::read(dir.path().join(name)).unwrap())
        .collect();
    cmd_dump_tables(dir.path()).unwrap();
    for (name, before) in ["aqi_breakpoints.csv", "wqi_parameters.csv", "label_table.csv"]
        .iter()
        .zip(&first)
    {
        assert_eq!(&fs::read(dir.path().join(name)).unwrap(), before, "{name}");
    }
    // 4 pollutants × 6 segments, plus header
    let breakpoints = fs::read_to_string(dir.path().join("aqi_breakpoints.csv")).unwrap();
    assert_eq!(breakpoints.lines().count(), 25);
    // 7 parameters plus header
    let parameters = fs::read_to_string(dir.path().join("wqi_parameters.csv")).unwrap();
    assert_eq!(parameters.lines().count(), 8);
    // 30 cells plus header
    let table = fs::read_to_string(dir.path().join("label_table.csv")).unwrap();
    assert_eq!(table.lines().count(), 31);
}
