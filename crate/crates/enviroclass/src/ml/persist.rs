//! Versioned model persistence.
//!
//! Models serialize to a structured JSON text file with an explicit
//! `format_version`; loading rejects files whose version is unknown.
//! Serialization order is fixed by the struct definition, so the same
//! model always produces byte-identical files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::forest::RandomForest;
use super::logreg::LogRegModel;
use super::stacking::StackingEnsemble;
use super::svc::SvcModel;
use crate::dataset::Standardizer;
use crate::error::{Error, Result};
use crate::labeler::EnvLabel;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    classes: Vec<String>,
    feature_names: Vec<String>,
    standardizer: Standardizer,
    k_folds: usize,
    forest: RandomForest,
    svc: SvcModel,
    logreg: LogRegModel,
    meta: LogRegModel,
}

/// Writes the ensemble and its feature schema to `path`.
pub fn save_model(path: &Path, ensemble: &StackingEnsemble, feature_names: &[String]) -> Result<()> {
    let file = ModelFile {
        format_version: FORMAT_VERSION,
        classes: ensemble.classes.iter().map(|c| c.name().to_string()).collect(),
        feature_names: feature_names.to_vec(),
        standardizer: ensemble.standardizer.clone(),
        k_folds: ensemble.k_folds,
        forest: ensemble.forest.clone(),
        svc: ensemble.svc.clone(),
        logreg: ensemble.logreg.clone(),
        meta: ensemble.meta.clone(),
    };
    let mut text = serde_json::to_string_pretty(&file)
        .map_err(|e| Error::ModelFormat(format!("cannot serialize model: {e}")))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io_at(path, e))
}

/// Loads an ensemble and its feature schema from `path`.
pub fn load_model(path: &Path) -> Result<(StackingEnsemble, Vec<String>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io_at(path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| {
        Error::ModelFormat(format!(
            "{}: not a valid model file (expected format_version {FORMAT_VERSION}): {e}",
            path.display()
        ))
    })?;
    let version = value.get("format_version").and_then(|v| v.as_u64());
    match version {
        Some(v) if v == FORMAT_VERSION as u64 => {}
        Some(v) => {
            return Err(Error::ModelFormat(format!(
                "{}: unsupported format_version {v}, this build reads {FORMAT_VERSION}",
                path.display()
            )))
        }
        None => {
            return Err(Error::ModelFormat(format!(
                "{}: missing format_version (expected {FORMAT_VERSION})",
                path.display()
            )))
        }
    }
    let file: ModelFile = serde_json::from_value(value).map_err(|e| {
        Error::ModelFormat(format!("{}: malformed model file: {e}", path.display()))
    })?;

    let mut classes = Vec::with_capacity(file.classes.len());
    for name in &file.classes {
        classes.push(name.parse::<EnvLabel>().map_err(|_| {
            Error::ModelFormat(format!("{}: unknown class `{name}`", path.display()))
        })?);
    }
    if classes != EnvLabel::ALL.to_vec() {
        return Err(Error::ModelFormat(format!(
            "{}: class list does not match this build",
            path.display()
        )));
    }

    let ensemble = StackingEnsemble {
        forest: file.forest,
        svc: file.svc,
        logreg: file.logreg,
        meta: file.meta,
        k_folds: file.k_folds,
        classes,
        standardizer: file.standardizer,
    };
    Ok((ensemble, file.feature_names))
}
