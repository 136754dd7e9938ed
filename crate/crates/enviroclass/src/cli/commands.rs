//! Pipeline commands shared by the binary and the integration tests.
//! Each command reads inputs named in the config, writes its artifacts
//! into the output directory, and prints a short deterministic summary.

use std::collections::BTreeMap;
use std::fs;
use std::fs::File;
use std::path::Path;

use super::config::RunConfig;
use super::csvio::{create, file_digest, fmt_float, read_matrix_csv, write_matrix_csv};
use super::report::RunReport;
use super::synth;
use crate::dataset::{
    attach_labels, impute_missing, is_missing, join_by_state, train_test_split, FeatureMatrix,
    JoinReport, SplitSpec,
};
use crate::error::{Error, Result};
use crate::eval::{accuracy, confusion, rank_features};
use crate::indices::{
    breakpoints, compute_aqi, compute_wqi, AirCategory, AqiResult, Pollutant, WaterCategory,
    WaterParameter, WqiResult,
};
use crate::ingest::{
    average_water_by_state, parse_air_csv, parse_water_csv, AirRecord, ParseReport, WaterAggregate,
};
use crate::labeler::{label_table, EnvLabel};
use crate::ml::forest::ForestParams;
use crate::ml::logreg::LogRegParams;
use crate::ml::persist::{load_model, save_model};
use crate::ml::stacking::{predict_stacking, train_stacking, StackingParams};
use crate::ml::svc::SvcParams;

struct IngestStage {
    air_records: Vec<AirRecord>,
    air_report: ParseReport,
    water_report: ParseReport,
    aggregates: BTreeMap<String, WaterAggregate>,
    matrix: FeatureMatrix,
    join_report: JoinReport,
}

fn open_source(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io_at(path, e))
}

fn run_ingest_stage(config: &RunConfig) -> Result<IngestStage> {
    let (air_records, air_report) =
        parse_air_csv(open_source(&config.air_csv)?, &config.air_columns)?;
    let (water_records, water_report) =
        parse_water_csv(open_source(&config.water_csv)?, &config.water_columns)?;
    let aggregates = average_water_by_state(&water_records);
    let (matrix, join_report) = join_by_state(&air_records, &aggregates)?;
    Ok(IngestStage {
        air_records,
        air_report,
        water_report,
        aggregates,
        matrix,
        join_report,
    })
}

struct LabeledStage {
    ingest: IngestStage,
    matrix: FeatureMatrix,
}

fn run_label_stage(config: &RunConfig) -> Result<LabeledStage> {
    let stage = run_ingest_stage(config)?;
    let aqi_per_row: Vec<AqiResult> = stage
        .join_report
        .kept_air_indices
        .iter()
        .map(|&i| compute_aqi(&stage.air_records[i]))
        .collect::<Result<_>>()?;
    let wqi_per_state: BTreeMap<String, WqiResult> = stage
        .aggregates
        .iter()
        .map(|(key, aggregate)| compute_wqi(aggregate).map(|wqi| (key.clone(), wqi)))
        .collect::<Result<_>>()?;
    let matrix = attach_labels(&stage.matrix, &aqi_per_row, &wqi_per_state)?;
    Ok(LabeledStage {
        ingest: stage,
        matrix,
    })
}

fn ensure_out_dir(config: &RunConfig) -> Result<()> {
    fs::create_dir_all(&config.out_dir).map_err(|e| Error::io_at(&config.out_dir, e))
}

fn print_parse_summary(name: &str, report: &ParseReport) {
    println!(
        "{name}: read {} rows, kept {}, dropped {} ({} all-missing, {} blank-state), \
         {} unparseable cells, {} out-of-range cells",
        report.rows_read,
        report.rows_kept,
        report.rows_dropped,
        report.dropped_all_missing,
        report.dropped_blank_state,
        report.unparseable_cells,
        report.clamped_cells
    );
}

/// `ingest`: parse both datasets and write the joined state-level CSV.
pub fn cmd_ingest(config: &RunConfig) -> Result<()> {
    ensure_out_dir(config)?;
    let stage = run_ingest_stage(config)?;
    let path = config.out_dir.join("joined.csv");
    write_matrix_csv(&stage.matrix, &path)?;
    print_parse_summary("air", &stage.air_report);
    print_parse_summary("water", &stage.water_report);
    println!(
        "joined {} rows over {} states ({} air rows had no water state)",
        stage.join_report.joined_rows,
        stage.aggregates.len(),
        stage.join_report.dropped_air_rows
    );
    println!("wrote {}", path.display());
    Ok(())
}

/// `label`: ingest plus the overall label column.
pub fn cmd_label(config: &RunConfig) -> Result<()> {
    ensure_out_dir(config)?;
    let stage = run_label_stage(config)?;
    let path = config.out_dir.join("labeled.csv");
    write_matrix_csv(&stage.matrix, &path)?;
    let mut histogram: BTreeMap<EnvLabel, usize> = BTreeMap::new();
    for label in stage.matrix.labels.as_ref().unwrap() {
        *histogram.entry(*label).or_default() += 1;
    }
    for (label, count) in &histogram {
        println!("{label}: {count}");
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn stacking_params(config: &RunConfig) -> StackingParams {
    StackingParams {
        k_folds: config.k_folds,
        seed: config.seed,
        forest: ForestParams {
            n_trees: config.n_trees,
            max_depth: config.max_depth,
            min_samples_split: config.min_samples_split,
            features_per_split: config.features_per_split,
            bootstrap: true,
            seed: 0, // overwritten by the stacking seed derivation
        },
        svc: SvcParams {
            lambda: config.svc_lambda,
            epochs: config.svc_epochs,
            seed: 0,
        },
        logreg: LogRegParams {
            l2: config.logreg_l2,
            learning_rate: config.logreg_rate,
            epochs: config.logreg_epochs,
        },
    }
}

fn prob_header() -> Vec<String> {
    let mut header = Vec::new();
    for label in EnvLabel::ALL {
        header.push(format!("p_{}", label.name().to_lowercase()));
    }
    header
}

/// `train`: full pipeline — ingest, label, impute, split, train, evaluate.
/// Writes `model.json`, `test_predictions.csv`, and `report.txt`.
pub fn cmd_train(config: &RunConfig) -> Result<()> {
    ensure_out_dir(config)?;
    let air_digest = file_digest(&config.air_csv)?;
    let water_digest = file_digest(&config.water_csv)?;

    let stage = run_label_stage(config)?;
    let (imputed, impute_report) = impute_missing(&stage.matrix);

    let split = train_test_split(
        &imputed,
        &SplitSpec {
            train_fraction: config.train_fraction,
            seed: config.seed,
            stratified: config.stratified,
        },
    )?;
    for warning in &split.warnings {
        println!("warning: {warning}");
    }

    let train_labels = split.train.labels.as_ref().unwrap();
    let ensemble = train_stacking(&split.train.rows, train_labels, &stacking_params(config))?;

    let test_labels = split.test.labels.as_ref().unwrap();
    let mut predicted = Vec::with_capacity(split.test.n_rows());
    let mut probabilities = Vec::with_capacity(split.test.n_rows());
    for row in &split.test.rows {
        let (label, probs) = predict_stacking(&ensemble, row)?;
        predicted.push(label);
        probabilities.push(probs);
    }
    let test_accuracy = accuracy(&predicted, test_labels)?;
    let matrix = confusion(&predicted, test_labels)?;
    let ranking = rank_features(&imputed)?;

    let model_path = config.out_dir.join("model.json");
    save_model(&model_path, &ensemble, &imputed.feature_names)?;

    let predictions_path = config.out_dir.join("test_predictions.csv");
    let mut writer = create(&predictions_path)?;
    let mut header = vec!["state".to_string(), "actual".to_string(), "predicted".to_string()];
    header.extend(prob_header());
    writer.write_record(&header)?;
    for (i, (label, probs)) in predicted.iter().zip(&probabilities).enumerate() {
        let mut record = vec![
            split.test.state_keys[i].clone(),
            test_labels[i].name().to_string(),
            label.name().to_string(),
        ];
        record.extend(probs.iter().map(|&p| fmt_float(p)));
        writer.write_record(&record)?;
    }
    writer.flush()?;

    let mut label_histogram: BTreeMap<EnvLabel, usize> = BTreeMap::new();
    for label in imputed.labels.as_ref().unwrap() {
        *label_histogram.entry(*label).or_default() += 1;
    }

    let report = RunReport {
        config_echo: config.echo(),
        seed: config.seed,
        air_digest,
        water_digest,
        air_report: stage.ingest.air_report.clone(),
        water_report: stage.ingest.water_report.clone(),
        water_states: stage.ingest.aggregates.len(),
        joined_rows: stage.ingest.join_report.joined_rows,
        join_dropped_air_rows: stage.ingest.join_report.dropped_air_rows,
        imputed_cells: impute_report.imputed_cells,
        removed_features: impute_report.removed_features.clone(),
        split_warnings: split.warnings.clone(),
        label_histogram,
        train_rows: split.train.n_rows(),
        test_rows: split.test.n_rows(),
        test_accuracy,
        confusion: matrix,
        ranking,
    };
    let report_path = config.out_dir.join("report.txt");
    fs::write(&report_path, report.render()).map_err(|e| Error::io_at(&report_path, e))?;

    println!("test_accuracy = {}", fmt_float(test_accuracy));
    println!("wrote {}", model_path.display());
    println!("wrote {}", predictions_path.display());
    println!("wrote {}", report_path.display());
    Ok(())
}

/// `rank-features`: Pearson ranking of every feature against the label rank.
pub fn cmd_rank_features(config: &RunConfig) -> Result<()> {
    ensure_out_dir(config)?;
    let stage = run_label_stage(config)?;
    let (imputed, _) = impute_missing(&stage.matrix);
    let ranking = rank_features(&imputed)?;

    let path = config.out_dir.join("feature_ranking.csv");
    let mut writer = create(&path)?;
    writer.write_record(["feature", "pearson_r", "note"])?;
    for entry in &ranking.entries {
        match entry.r {
            Some(r) => writer.write_record([entry.name.as_str(), &fmt_float(r), ""])?,
            None => writer.write_record([entry.name.as_str(), "", "not computable"])?,
        }
    }
    writer.flush()?;
    println!("wrote {}", path.display());
    Ok(())
}

/// `predict`: apply a saved model to a prepared feature CSV.
/// Missing feature cells fall back to the training means.
pub fn cmd_predict(out_dir: &Path, model_path: &Path, input_path: &Path) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io_at(out_dir, e))?;
    let (ensemble, feature_names) = load_model(model_path)?;
    let matrix = read_matrix_csv(input_path, &feature_names)?;

    let path = out_dir.join("predictions.csv");
    let mut writer = create(&path)?;
    let mut header = vec!["state".to_string(), "label".to_string()];
    header.extend(prob_header());
    writer.write_record(&header)?;

    for (i, row) in matrix.rows.iter().enumerate() {
        let filled: Vec<f64> = row
            .iter()
            .zip(&ensemble.standardizer.means)
            .map(|(&v, &mean)| if is_missing(v) { mean } else { v })
            .collect();
        let (label, probs) = predict_stacking(&ensemble, &filled)?;
        let mut record = vec![matrix.state_keys[i].clone(), label.name().to_string()];
        record.extend(probs.iter().map(|&p| fmt_float(p)));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    println!("wrote {}", path.display());
    Ok(())
}

/// `synth`: deterministic synthetic source datasets.
pub fn cmd_synth(out_dir: &Path, rows: usize, seed: u64) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io_at(out_dir, e))?;
    let air_path = out_dir.join("synth_air.csv");
    let water_path = out_dir.join("synth_water.csv");
    synth::generate(&air_path, &water_path, rows, seed)?;
    println!("wrote {}", air_path.display());
    println!("wrote {}", water_path.display());
    Ok(())
}

/// `dump-tables`: the embedded index and label tables as CSV.
pub fn cmd_dump_tables(out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io_at(out_dir, e))?;

    let breakpoints_path = out_dir.join("aqi_breakpoints.csv");
    let mut writer = create(&breakpoints_path)?;
    writer.write_record(["pollutant", "conc_lo", "conc_hi", "index_lo", "index_hi"])?;
    for pollutant in Pollutant::ALL {
        for segment in breakpoints(pollutant) {
            writer.write_record([
                pollutant.name(),
                &fmt_float(segment.conc_lo),
                &fmt_float(segment.conc_hi),
                &fmt_float(segment.index_lo),
                &fmt_float(segment.index_hi),
            ])?;
        }
    }
    writer.flush()?;

    let parameters_path = out_dir.join("wqi_parameters.csv");
    let mut writer = create(&parameters_path)?;
    writer.write_record(["parameter", "ideal", "standard", "unit_weight"])?;
    for parameter in WaterParameter::ALL {
        writer.write_record([
            parameter.name(),
            &fmt_float(parameter.ideal()),
            &fmt_float(parameter.standard()),
            &fmt_float(parameter.unit_weight()),
        ])?;
    }
    writer.flush()?;

    let table_path = out_dir.join("label_table.csv");
    let mut writer = create(&table_path)?;
    writer.write_record(["air", "water", "label", "provenance"])?;
    let table = label_table();
    for air in AirCategory::ALL {
        for water in WaterCategory::ALL {
            writer.write_record([
                air.name(),
                water.name(),
                table.get(air, water).name(),
                table.provenance(air, water).as_str(),
            ])?;
        }
    }
    writer.flush()?;

    println!("wrote {}", breakpoints_path.display());
    println!("wrote {}", parameters_path.display());
    println!("wrote {}", table_path.display());
    Ok(())
}
