//! Flat `key = value` configuration files with `#` comments.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::ingest::{AirColumnMapping, WaterColumnMapping};

/// Everything a pipeline run needs. Defaults cover the reference
/// datasets; any key can be overridden in the config file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub air_csv: PathBuf,
    pub water_csv: PathBuf,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub train_fraction: f64,
    pub stratified: bool,
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub features_per_split: Option<usize>,
    pub svc_lambda: f64,
    pub svc_epochs: usize,
    pub logreg_rate: f64,
    pub logreg_epochs: usize,
    pub logreg_l2: f64,
    pub k_folds: usize,
    pub air_columns: AirColumnMapping,
    pub water_columns: WaterColumnMapping,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            air_csv: PathBuf::from("air.csv"),
            water_csv: PathBuf::from("water.csv"),
            out_dir: PathBuf::from("."),
            seed: 42,
            train_fraction: 0.8,
            stratified: true,
            n_trees: 10,
            max_depth: 12,
            min_samples_split: 2,
            features_per_split: None,
            svc_lambda: 0.01,
            svc_epochs: 50,
            logreg_rate: 0.3,
            logreg_epochs: 400,
            logreg_l2: 1e-4,
            k_folds: 5,
            air_columns: AirColumnMapping::default(),
            water_columns: WaterColumnMapping::default(),
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse::<T>()
        .map_err(|_| Error::Config(format!("invalid value `{value}` for key `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(Error::Config(format!(
            "invalid value `{other}` for key `{key}` (expected true or false)"
        ))),
    }
}

impl RunConfig {
    /// Reads a config file over the defaults. Unknown keys are errors.
    pub fn from_file(path: &Path) -> Result<RunConfig> {
        let text = fs::read_to_string(path).map_err(|e| Error::io_at(path, e))?;
        let mut config = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "{}:{}: expected `key = value`, got `{line}`",
                    path.display(),
                    lineno + 1
                )));
            };
            config.set(key.trim(), value.trim())?;
        }
        config.validate()?;
        Ok(config)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "air_csv" => self.air_csv = PathBuf::from(value),
            "water_csv" => self.water_csv = PathBuf::from(value),
            "out_dir" => self.out_dir = PathBuf::from(value),
            "seed" => self.seed = parse_value(key, value)?,
            "train_fraction" => self.train_fraction = parse_value(key, value)?,
            "stratified" => self.stratified = parse_bool(key, value)?,
            "n_trees" => self.n_trees = parse_value(key, value)?,
            "max_depth" => self.max_depth = parse_value(key, value)?,
            "min_samples_split" => self.min_samples_split = parse_value(key, value)?,
            "features_per_split" => {
                self.features_per_split = if value == "sqrt" {
                    None
                } else {
                    Some(parse_value(key, value)?)
                }
            }
            "svc_lambda" => self.svc_lambda = parse_value(key, value)?,
            "svc_epochs" => self.svc_epochs = parse_value(key, value)?,
            "logreg_rate" => self.logreg_rate = parse_value(key, value)?,
            "logreg_epochs" => self.logreg_epochs = parse_value(key, value)?,
            "logreg_l2" => self.logreg_l2 = parse_value(key, value)?,
            "k_folds" => self.k_folds = parse_value(key, value)?,
            "air.col.state" => self.air_columns.state = value.to_string(),
            "air.col.location" => self.air_columns.location = value.to_string(),
            "air.col.so2" => self.air_columns.so2 = value.to_string(),
            "air.col.no2" => self.air_columns.no2 = value.to_string(),
            "air.col.rspm" => self.air_columns.rspm = value.to_string(),
            "air.col.spm" => self.air_columns.spm = value.to_string(),
            "water.col.state" => self.water_columns.state = value.to_string(),
            "water.col.location" => self.water_columns.location = value.to_string(),
            "water.col.do" => self.water_columns.dissolved_oxygen = value.to_string(),
            "water.col.ph" => self.water_columns.ph = value.to_string(),
            "water.col.conductivity" => self.water_columns.conductivity = value.to_string(),
            "water.col.bod" => self.water_columns.bod = value.to_string(),
            "water.col.nitrate" => self.water_columns.nitrate = value.to_string(),
            "water.col.fecal_coliform" => self.water_columns.fecal_coliform = value.to_string(),
            "water.col.total_coliform" => self.water_columns.total_coliform = value.to_string(),
            other => return Err(Error::Config(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Config(format!(
                "train_fraction must lie in (0, 1), got {}",
                self.train_fraction
            )));
        }
        for (name, value) in [
            ("n_trees", self.n_trees),
            ("max_depth", self.max_depth),
            ("min_samples_split", self.min_samples_split),
            ("svc_epochs", self.svc_epochs),
            ("logreg_epochs", self.logreg_epochs),
            ("k_folds", self.k_folds),
        ] {
            if value == 0 && name != "max_depth" {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }

    /// All settings as sorted `key = value` lines for the run report.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut entries = vec![
            ("air_csv".to_string(), self.air_csv.display().to_string()),
            ("water_csv".to_string(), self.water_csv.display().to_string()),
            ("out_dir".to_string(), self.out_dir.display().to_string()),
            ("seed".to_string(), self.seed.to_string()),
            ("train_fraction".to_string(), self.train_fraction.to_string()),
            ("stratified".to_string(), self.stratified.to_string()),
            ("n_trees".to_string(), self.n_trees.to_string()),
            ("max_depth".to_string(), self.max_depth.to_string()),
            ("min_samples_split".to_string(), self.min_samples_split.to_string()),
            (
                "features_per_split".to_string(),
                self.features_per_split.map_or("sqrt".to_string(), |v| v.to_string()),
            ),
            ("svc_lambda".to_string(), self.svc_lambda.to_string()),
            ("svc_epochs".to_string(), self.svc_epochs.to_string()),
            ("logreg_rate".to_string(), self.logreg_rate.to_string()),
            ("logreg_epochs".to_string(), self.logreg_epochs.to_string()),
            ("logreg_l2".to_string(), self.logreg_l2.to_string()),
            ("k_folds".to_string(), self.k_folds.to_string()),
            ("air.col.state".to_string(), self.air_columns.state.clone()),
            ("air.col.location".to_string(), self.air_columns.location.clone()),
            ("air.col.so2".to_string(), self.air_columns.so2.clone()),
            ("air.col.no2".to_string(), self.air_columns.no2.clone()),
            ("air.col.rspm".to_string(), self.air_columns.rspm.clone()),
            ("air.col.spm".to_string(), self.air_columns.spm.clone()),
            ("water.col.state".to_string(), self.water_columns.state.clone()),
            ("water.col.location".to_string(), self.water_columns.location.clone()),
            ("water.col.do".to_string(), self.water_columns.dissolved_oxygen.clone()),
            ("water.col.ph".to_string(), self.water_columns.ph.clone()),
            ("water.col.conductivity".to_string(), self.water_columns.conductivity.clone()),
            ("water.col.bod".to_string(), self.water_columns.bod.clone()),
            ("water.col.nitrate".to_string(), self.water_columns.nitrate.clone()),
            (
                "water.col.fecal_coliform".to_string(),
                self.water_columns.fecal_coliform.clone(),
            ),
            (
                "water.col.total_coliform".to_string(),
                self.water_columns.total_coliform.clone(),
            ),
        ];
        entries.sort();
        entries
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn config_from(text: &str) -> Result<RunConfig> {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(text.as_bytes()).unwrap();
        RunConfig::from_file(file.path())
    }

    #[test]
    fn empty_file_gives_defaults() {
        let config = config_from("").unwrap();
        assert_eq!(config, RunConfig::default());
    }

    #[test]
    fn comments_and_blanks_are_skipped() {
        let config = config_from("# a comment\n\nseed = 7\n").unwrap();
        assert_eq!(config.seed, 7);
    }

    #[test]
    fn keys_override_defaults() {
        let config = config_from(
            "air_csv = data/a.csv\nn_trees = 25\nstratified = false\nfeatures_per_split = 3\nair.col.so2 = SO2 reading\n",
        )
        .unwrap();
        assert_eq!(config.air_csv, PathBuf::from("data/a.csv"));
        assert_eq!(config.n_trees, 25);
        assert!(!config.stratified);
        assert_eq!(config.features_per_split, Some(3));
        assert_eq!(config.air_columns.so2, "SO2 reading");
    }

    #[test]
    fn unknown_key_is_rejected() {
        let err = config_from("tres = 10\n").unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(err.to_string().contains("tres"));
    }

    #[test]
    fn bad_numeric_value_is_rejected() {
        assert!(config_from("n_trees = ten\n").is_err());
        assert!(config_from("train_fraction = 1.5\n").is_err());
        assert!(config_from("k_folds = 0\n").is_err());
    }
}
