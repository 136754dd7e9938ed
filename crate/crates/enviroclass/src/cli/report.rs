//! Structured-text run report: key/value sections plus CSV blocks for
//! the confusion matrix and feature ranking. Contains everything needed
//! to reproduce a run (config echo, seed, input digests) and no
//! timestamp, so identical runs render identical reports.

use std::collections::BTreeMap;

use super::csvio::fmt_float;
use crate::eval::{ConfusionMatrix, FeatureRanking};
use crate::ingest::ParseReport;
use crate::labeler::EnvLabel;

#[derive(Debug, Clone)]
pub struct RunReport {
    pub config_echo: Vec<(String, String)>,
    pub seed: u64,
    pub air_digest: String,
    pub water_digest: String,
    pub air_report: ParseReport,
    pub water_report: ParseReport,
    pub water_states: usize,
    pub joined_rows: usize,
    pub join_dropped_air_rows: usize,
    pub imputed_cells: usize,
    pub removed_features: Vec<String>,
    pub split_warnings: Vec<String>,
    pub label_histogram: BTreeMap<EnvLabel, usize>,
    pub train_rows: usize,
    pub test_rows: usize,
    pub test_accuracy: f64,
    pub confusion: ConfusionMatrix,
    pub ranking: FeatureRanking,
}

fn parse_section(out: &mut String, name: &str, report: &ParseReport) {
    out.push_str(&format!("{name}_rows_read = {}\n", report.rows_read));
    out.push_str(&format!("{name}_rows_kept = {}\n", report.rows_kept));
    out.push_str(&format!("{name}_rows_dropped = {}\n", report.rows_dropped));
    out.push_str(&format!(
        "{name}_dropped_all_missing = {}\n",
        report.dropped_all_missing
    ));
    out.push_str(&format!(
        "{name}_dropped_blank_state = {}\n",
        report.dropped_blank_state
    ));
    out.push_str(&format!("{name}_unparseable_cells = {}\n", report.unparseable_cells));
    out.push_str(&format!("{name}_clamped_cells = {}\n", report.clamped_cells));
}

impl RunReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "tool = enviroclass {}\n",
            env!("CARGO_PKG_VERSION")
        ));
        out.push_str(&format!("seed = {}\n", self.seed));
        out.push('\n');

        out.push_str("[config]\n");
        for (key, value) in &self.config_echo {
            out.push_str(&format!("{key} = {value}\n"));
        }
        out.push('\n');

        out.push_str("[inputs]\n");
        out.push_str(&format!("air_csv_sha256 = {}\n", self.air_digest));
        out.push_str(&format!("water_csv_sha256 = {}\n", self.water_digest));
        out.push('\n');

        out.push_str("[pipeline]\n");
        parse_section(&mut out, "air", &self.air_report);
        parse_section(&mut out, "water", &self.water_report);
        out.push_str(&format!("water_states = {}\n", self.water_states));
        out.push_str(&format!("joined_rows = {}\n", self.joined_rows));
        out.push_str(&format!(
            "join_dropped_air_rows = {}\n",
            self.join_dropped_air_rows
        ));
        out.push_str(&format!("imputed_cells = {}\n", self.imputed_cells));
        out.push_str(&format!(
            "removed_features = {}\n",
            self.removed_features.join(";")
        ));
        for warning in &self.split_warnings {
            out.push_str(&format!("split_warning = {warning}\n"));
        }
        out.push_str(&format!("train_rows = {}\n", self.train_rows));
        out.push_str(&format!("test_rows = {}\n", self.test_rows));
        out.push('\n');

        out.push_str("[label_histogram]\n");
        out.push_str("label,count\n");
        for label in EnvLabel::ALL {
            let count = self.label_histogram.get(&label).copied().unwrap_or(0);
            out.push_str(&format!("{label},{count}\n"));
        }
        out.push('\n');

        out.push_str("[results]\n");
        out.push_str(&format!("test_accuracy = {}\n", fmt_float(self.test_accuracy)));
        out.push('\n');

        out.push_str("[confusion]\n");
        out.push_str("actual\\predicted");
        for label in EnvLabel::ALL {
            out.push_str(&format!(",{label}"));
        }
        out.push('\n');
        for (i, label) in EnvLabel::ALL.into_iter().enumerate() {
            out.push_str(label.name());
            for j in 0..EnvLabel::ALL.len() {
                out.push_str(&format!(",{}", self.confusion.counts[i][j]));
            }
            out.push('\n');
        }
        out.push('\n');

        out.push_str("[feature_ranking]\n");
        out.push_str("feature,pearson_r,note\n");
        for entry in &self.ranking.entries {
            match entry.r {
                Some(r) => out.push_str(&format!("{},{},\n", entry.name, fmt_float(r))),
                None => out.push_str(&format!("{},,not computable\n", entry.name)),
            }
        }
        out
    }
}
