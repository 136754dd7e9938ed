//! Canonical CSV reading and writing for pipeline artifacts.
//!
//! All emitted CSVs are UTF-8, comma-delimited, carry a header row, and
//! print floating values with nine significant digits. Missing cells are
//! empty strings.

use std::fs::File;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::dataset::{is_missing, FeatureMatrix};
use crate::error::{Error, Result};
use crate::labeler::EnvLabel;

/// Formats a float with nine significant digits in plain decimal.
pub fn fmt_float(value: f64) -> String {
    if value == 0.0 {
        return "0.00000000".to_string();
    }
    let magnitude = value.abs().log10().floor() as i32;
    let decimals = (8 - magnitude).clamp(0, 17) as usize;
    format!("{value:.decimals$}")
}

/// A cell that may be missing.
pub fn fmt_cell(value: f64) -> String {
    if is_missing(value) {
        String::new()
    } else {
        fmt_float(value)
    }
}

pub fn create(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|e| Error::io_at(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

pub fn open(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io_at(path, e))?;
    Ok(csv::Reader::from_reader(file))
}

/// Writes `state,<features...>[,label]`.
pub fn write_matrix_csv(matrix: &FeatureMatrix, path: &Path) -> Result<()> {
    let mut writer = create(path)?;
    let mut header: Vec<&str> = Vec::with_capacity(matrix.n_features() + 2);
    header.push("state");
    header.extend(matrix.feature_names.iter().map(String::as_str));
    if matrix.labels.is_some() {
        header.push("label");
    }
    writer.write_record(&header)?;

    for (i, row) in matrix.rows.iter().enumerate() {
        let mut record: Vec<String> = Vec::with_capacity(header.len());
        record.push(matrix.state_keys[i].clone());
        record.extend(row.iter().map(|&v| fmt_cell(v)));
        if let Some(labels) = &matrix.labels {
            record.push(labels[i].name().to_string());
        }
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads a matrix CSV back. `required_features` must all be present as
/// columns; extra columns are ignored. A `label` column is optional.
pub fn read_matrix_csv(path: &Path, required_features: &[String]) -> Result<FeatureMatrix> {
    let mut reader = open(path)?;
    let headers = reader.headers()?.clone();

    let state_idx = headers
        .iter()
        .position(|h| h == "state")
        .ok_or_else(|| Error::Schema {
            dataset: path.display().to_string(),
            column: "state".to_string(),
        })?;
    let label_idx = headers.iter().position(|h| h == "label");

    let mut feature_idx = Vec::with_capacity(required_features.len());
    for name in required_features {
        let idx = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Schema {
                dataset: path.display().to_string(),
                column: name.clone(),
            })?;
        feature_idx.push(idx);
    }

    let mut rows = Vec::new();
    let mut state_keys = Vec::new();
    let mut labels = Vec::new();
    for record in reader.records() {
        let record = record?;
        state_keys.push(record.get(state_idx).unwrap_or("").to_string());
        let mut row = Vec::with_capacity(feature_idx.len());
        for &idx in &feature_idx {
            let raw = record.get(idx).unwrap_or("").trim();
            if raw.is_empty() {
                row.push(f64::NAN);
            } else {
                row.push(raw.parse::<f64>().map_err(|_| {
                    Error::domain(format!(
                        "{}: cell `{raw}` is not numeric",
                        path.display()
                    ))
                })?);
            }
        }
        rows.push(row);
        if let Some(idx) = label_idx {
            let raw = record.get(idx).unwrap_or("");
            labels.push(raw.parse::<EnvLabel>()?);
        }
    }

    FeatureMatrix::new(
        required_features.to_vec(),
        rows,
        label_idx.map(|_| labels),
        state_keys,
    )
}

/// SHA-256 hex digest of a file, for run reports.
pub fn file_digest(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io_at(path, e))?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(format!("{:x}", hasher.finalize()))
}
