//! CSV ingestion for the two source datasets.
//!
//! Parses air- and water-quality CSVs into typed records, applies the
//! missing-data policy (a row is dropped only when every measurement is
//! missing), and averages water records to one row per state.
//!
//! Cell handling: blank and unparseable cells become missing values;
//! negative or out-of-range readings (sensor sentinels like `-1`) are
//! also demoted to missing so they cannot poison downstream means. All
//! of this is tallied in a [`ParseReport`].

use std::collections::BTreeMap;
use std::io::Read;

use crate::error::{Error, Result};

/// Logical air measurement field names, in canonical order.
pub const AIR_FIELDS: [&str; 4] = ["so2", "no2", "rspm", "spm"];

/// Logical water measurement field names, in canonical order.
pub const WATER_FIELDS: [&str; 7] = [
    "do",
    "ph",
    "conductivity",
    "bod",
    "nitrate",
    "fecal_coliform",
    "total_coliform",
];

/// One raw air-quality observation. Concentrations are in µg/m³.
#[derive(Debug, Clone, PartialEq)]
pub struct AirRecord {
    pub state: String,
    pub location: String,
    pub so2: Option<f64>,
    pub no2: Option<f64>,
    pub rspm: Option<f64>,
    pub spm: Option<f64>,
}

impl AirRecord {
    /// Measurement values in `AIR_FIELDS` order.
    pub fn measurements(&self) -> [Option<f64>; 4] {
        [self.so2, self.no2, self.rspm, self.spm]
    }
}

/// One raw water-quality observation.
#[derive(Debug, Clone, PartialEq)]
pub struct WaterRecord {
    pub state: String,
    pub location: String,
    pub dissolved_oxygen: Option<f64>,
    pub ph: Option<f64>,
    pub conductivity: Option<f64>,
    pub bod: Option<f64>,
    pub nitrate: Option<f64>,
    pub fecal_coliform: Option<f64>,
    pub total_coliform: Option<f64>,
}

impl WaterRecord {
    /// Measurement values in `WATER_FIELDS` order.
    pub fn measurements(&self) -> [Option<f64>; 7] {
        [
            self.dissolved_oxygen,
            self.ph,
            self.conductivity,
            self.bod,
            self.nitrate,
            self.fecal_coliform,
            self.total_coliform,
        ]
    }
}

/// Per-state arithmetic means of water measurements.
///
/// Each mean is taken over the records where that parameter is present,
/// so different parameters may have different effective sample sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct WaterAggregate {
    /// Display form of the state name (first spelling seen).
    pub state: String,
    pub dissolved_oxygen: Option<f64>,
    pub ph: Option<f64>,
    pub conductivity: Option<f64>,
    pub bod: Option<f64>,
    pub nitrate: Option<f64>,
    pub fecal_coliform: Option<f64>,
    pub total_coliform: Option<f64>,
    /// Number of records that contributed to this state.
    pub sample_count: usize,
}

impl WaterAggregate {
    /// Mean values in `WATER_FIELDS` order.
    pub fn measurements(&self) -> [Option<f64>; 7] {
        [
            self.dissolved_oxygen,
            self.ph,
            self.conductivity,
            self.bod,
            self.nitrate,
            self.fecal_coliform,
            self.total_coliform,
        ]
    }
}

/// Maps logical air fields to the column names of a concrete CSV export.
#[derive(Debug, Clone, PartialEq)]
pub struct AirColumnMapping {
    pub state: String,
    pub location: String,
    pub so2: String,
    pub no2: String,
    pub rspm: String,
    pub spm: String,
}

impl Default for AirColumnMapping {
    fn default() -> Self {
        AirColumnMapping {
            state: "state".into(),
            location: "location".into(),
            so2: "so2".into(),
            no2: "no2".into(),
            rspm: "rspm".into(),
            spm: "spm".into(),
        }
    }
}

/// Maps logical water fields to the column names of a concrete CSV export.
///
/// The defaults target the public Indian surface-water dataset, whose
/// header names are reproduced verbatim.
#[derive(Debug, Clone, PartialEq)]
pub struct WaterColumnMapping {
    pub state: String,
    pub location: String,
    pub dissolved_oxygen: String,
    pub ph: String,
    pub conductivity: String,
    pub bod: String,
    pub nitrate: String,
    pub fecal_coliform: String,
    pub total_coliform: String,
}

impl Default for WaterColumnMapping {
    fn default() -> Self {
        WaterColumnMapping {
            state: "STATE".into(),
            location: "LOCATIONS".into(),
            dissolved_oxygen: "D.O. (mg/l)".into(),
            ph: "PH".into(),
            conductivity: "CONDUCTIVITY (µmhos/cm)".into(),
            bod: "B.O.D. (mg/l)".into(),
            nitrate: "NITRATENAN N+ NITRITENANN (mg/l)".into(),
            fecal_coliform: "FECAL COLIFORM (MPN/100ml)".into(),
            total_coliform: "TOTAL COLIFORM (MPN/100ml)Mean".into(),
        }
    }
}

/// Tally of what happened while parsing one CSV.
///
/// Cell-level counters cover every data row that had a usable state key;
/// rows dropped for a blank state are counted before their cells are
/// examined.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseReport {
    pub rows_read: usize,
    pub rows_kept: usize,
    pub rows_dropped: usize,
    /// Rows dropped because every measurement field was missing.
    pub dropped_all_missing: usize,
    /// Rows dropped because the state cell was blank.
    pub dropped_blank_state: usize,
    /// Cells that ended up missing, per logical field.
    pub missing_by_field: BTreeMap<String, usize>,
    /// Cells with text that did not parse as a finite number.
    pub unparseable_cells: usize,
    /// Cells demoted to missing for being out of physical range.
    pub clamped_cells: usize,
}

impl ParseReport {
    fn new(fields: &[&str]) -> Self {
        ParseReport {
            rows_read: 0,
            rows_kept: 0,
            rows_dropped: 0,
            dropped_all_missing: 0,
            dropped_blank_state: 0,
            missing_by_field: fields.iter().map(|f| (f.to_string(), 0)).collect(),
            unparseable_cells: 0,
            clamped_cells: 0,
        }
    }
}

/// Normalizes a state name into the join key: trimmed, internal
/// whitespace collapsed, case-folded.
pub fn normalize_state_key(raw: &str) -> String {
    raw.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

/// Valid range for one measurement; values outside are demoted to missing.
struct FieldSpec {
    name: &'static str,
    min: f64,
    max: f64,
}

const AIR_SPECS: [FieldSpec; 4] = [
    FieldSpec { name: "so2", min: 0.0, max: f64::INFINITY },
    FieldSpec { name: "no2", min: 0.0, max: f64::INFINITY },
    FieldSpec { name: "rspm", min: 0.0, max: f64::INFINITY },
    FieldSpec { name: "spm", min: 0.0, max: f64::INFINITY },
];

const WATER_SPECS: [FieldSpec; 7] = [
    FieldSpec { name: "do", min: 0.0, max: f64::INFINITY },
    FieldSpec { name: "ph", min: 0.0, max: 14.0 },
    FieldSpec { name: "conductivity", min: 0.0, max: f64::INFINITY },
    FieldSpec { name: "bod", min: 0.0, max: f64::INFINITY },
    FieldSpec { name: "nitrate", min: 0.0, max: f64::INFINITY },
    FieldSpec { name: "fecal_coliform", min: 0.0, max: f64::INFINITY },
    FieldSpec { name: "total_coliform", min: 0.0, max: f64::INFINITY },
];

fn resolve_column(headers: &csv::StringRecord, name: &str, dataset: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name.trim())
        .ok_or_else(|| Error::Schema {
            dataset: dataset.to_string(),
            column: name.to_string(),
        })
}

fn parse_cell(raw: &str, spec: &FieldSpec, report: &mut ParseReport) -> Option<f64> {
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        *report.missing_by_field.get_mut(spec.name).unwrap() += 1;
        return None;
    }
    match trimmed.parse::<f64>() {
        Ok(v) if v.is_finite() => {
            if v < spec.min || v > spec.max {
                report.clamped_cells += 1;
                *report.missing_by_field.get_mut(spec.name).unwrap() += 1;
                None
            } else {
                Some(v)
            }
        }
        _ => {
            report.unparseable_cells += 1;
            *report.missing_by_field.get_mut(spec.name).unwrap() += 1;
            None
        }
    }
}

/// A kept row: state, location, and the measurement values.
type ParsedRow<const N: usize> = (String, String, [Option<f64>; N]);

/// Shared row loop for the two datasets. Yields `(state, location, values)`
/// for kept rows; drop bookkeeping goes into the report.
fn parse_rows<R: Read, const N: usize>(
    source: R,
    dataset: &str,
    state_col: &str,
    location_col: &str,
    value_cols: [&str; N],
    specs: &[FieldSpec; N],
) -> Result<(Vec<ParsedRow<N>>, ParseReport)> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(source);
    let headers = reader.headers()?.clone();

    let state_idx = resolve_column(&headers, state_col, dataset)?;
    let location_idx = resolve_column(&headers, location_col, dataset)?;
    let mut value_idx = [0usize; N];
    for (k, col) in value_cols.iter().enumerate() {
        value_idx[k] = resolve_column(&headers, col, dataset)?;
    }

    let names: Vec<&str> = specs.iter().map(|s| s.name).collect();
    let mut report = ParseReport::new(&names);
    let mut rows = Vec::new();

    for record in reader.records() {
        let record = record?;
        report.rows_read += 1;

        let state = record.get(state_idx).unwrap_or("").trim().to_string();
        if state.is_empty() {
            report.rows_dropped += 1;
            report.dropped_blank_state += 1;
            continue;
        }

        let mut values = [None; N];
        for k in 0..N {
            let raw = record.get(value_idx[k]).unwrap_or("");
            values[k] = parse_cell(raw, &specs[k], &mut report);
        }

        if values.iter().all(Option::is_none) {
            report.rows_dropped += 1;
            report.dropped_all_missing += 1;
            continue;
        }

        let location = record.get(location_idx).unwrap_or("").trim().to_string();
        report.rows_kept += 1;
        rows.push((state, location, values));
    }

    Ok((rows, report))
}

/// Parses the air dataset. Rows where every pollutant is missing are dropped.
pub fn parse_air_csv<R: Read>(
    source: R,
    mapping: &AirColumnMapping,
) -> Result<(Vec<AirRecord>, ParseReport)> {
    let (rows, report) = parse_rows(
        source,
        "air",
        &mapping.state,
        &mapping.location,
        [&mapping.so2, &mapping.no2, &mapping.rspm, &mapping.spm],
        &AIR_SPECS,
    )?;
    let records = rows
        .into_iter()
        .map(|(state, location, [so2, no2, rspm, spm])| AirRecord {
            state,
            location,
            so2,
            no2,
            rspm,
            spm,
        })
        .collect();
    Ok((records, report))
}

/// Parses the water dataset. Rows where every parameter is missing are dropped.
pub fn parse_water_csv<R: Read>(
    source: R,
    mapping: &WaterColumnMapping,
) -> Result<(Vec<WaterRecord>, ParseReport)> {
    let (rows, report) = parse_rows(
        source,
        "water",
        &mapping.state,
        &mapping.location,
        [
            &mapping.dissolved_oxygen,
            &mapping.ph,
            &mapping.conductivity,
            &mapping.bod,
            &mapping.nitrate,
            &mapping.fecal_coliform,
            &mapping.total_coliform,
        ],
        &WATER_SPECS,
    )?;
    let records = rows
        .into_iter()
        .map(
            |(state, location, [dissolved_oxygen, ph, conductivity, bod, nitrate, fecal_coliform, total_coliform])| {
                WaterRecord {
                    state,
                    location,
                    dissolved_oxygen,
                    ph,
                    conductivity,
                    bod,
                    nitrate,
                    fecal_coliform,
                    total_coliform,
                }
            },
        )
        .collect();
    Ok((records, report))
}

/// Averages water records per state. Each parameter's mean uses only the
/// records where that parameter is present.
///
/// Contributions are summed in sorted order so the result is bit-exact
/// under any permutation of the input rows.
pub fn average_water_by_state(records: &[WaterRecord]) -> BTreeMap<String, WaterAggregate> {
    struct Acc {
        state: String,
        values: [Vec<f64>; 7],
        sample_count: usize,
    }

    let mut by_state: BTreeMap<String, Acc> = BTreeMap::new();
    for record in records {
        let key = normalize_state_key(&record.state);
        let acc = by_state.entry(key).or_insert_with(|| Acc {
            state: record.state.clone(),
            values: Default::default(),
            sample_count: 0,
        });
        acc.sample_count += 1;
        for (k, value) in record.measurements().into_iter().enumerate() {
            if let Some(v) = value {
                acc.values[k].push(v);
            }
        }
    }

    by_state
        .into_iter()
        .map(|(key, mut acc)| {
            for values in &mut acc.values {
                values.sort_by(f64::total_cmp);
            }
            let mean = |k: usize| {
                let values = &acc.values[k];
                if values.is_empty() {
                    None
                } else {
                    Some(values.iter().sum::<f64>() / values.len() as f64)
                }
            };
            (
                key,
                WaterAggregate {
                    state: acc.state,
                    dissolved_oxygen: mean(0),
                    ph: mean(1),
                    conductivity: mean(2),
                    bod: mean(3),
                    nitrate: mean(4),
                    fecal_coliform: mean(5),
                    total_coliform: mean(6),
                    sample_count: acc.sample_count,
                },
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn air(csv: &str) -> (Vec<AirRecord>, ParseReport) {
        parse_air_csv(csv.as_bytes(), &AirColumnMapping::default()).unwrap()
    }

    fn water(csv: &str) -> (Vec<WaterRecord>, ParseReport) {
        parse_water_csv(csv.as_bytes(), &WaterColumnMapping::default()).unwrap()
    }

    const WATER_HEADER: &str = "STATE,LOCATIONS,D.O. (mg/l),PH,CONDUCTIVITY (µmhos/cm),B.O.D. (mg/l),NITRATENAN N+ NITRITENANN (mg/l),FECAL COLIFORM (MPN/100ml),TOTAL COLIFORM (MPN/100ml)Mean";

    #[test]
    fn header_only_air_file_yields_empty_sequence() {
        let (records, report) = air("state,location,so2,no2,rspm,spm\n");
        assert!(records.is_empty());
        assert_eq!(report.rows_read, 0);
        assert_eq!(report.rows_kept, 0);
        assert_eq!(report.rows_dropped, 0);
    }

    #[test]
    fn blank_cell_becomes_missing() {
        let (records, report) = air("state,location,so2,no2,rspm,spm\nA,L,12.0,,,\n");
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].so2, Some(12.0));
        assert_eq!(records[0].no2, None);
        assert_eq!(report.missing_by_field["no2"], 1);
        assert_eq!(report.rows_kept, 1);
    }

    #[test]
    fn all_blank_measurements_drop_the_row() {
        let (records, report) = air("state,location,so2,no2,rspm,spm\nA,L,,,,\n");
        assert!(records.is_empty());
        assert_eq!(report.rows_read, 1);
        assert_eq!(report.rows_dropped, 1);
        assert_eq!(report.dropped_all_missing, 1);
    }

    #[test]
    fn missing_mapped_column_is_a_schema_error() {
        let err = parse_air_csv("state,location,so2\nA,L,1\n".as_bytes(), &AirColumnMapping::default())
            .unwrap_err();
        match err {
            Error::Schema { dataset, column } => {
                assert_eq!(dataset, "air");
                assert_eq!(column, "no2");
            }
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn unparseable_numeric_is_missing_not_fatal() {
        let csv = format!("{WATER_HEADER}\nA,L,,abc,,3.1,,,\n");
        let (records, report) = water(&csv);
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].ph, None);
        assert_eq!(records[0].bod, Some(3.1));
        assert_eq!(report.unparseable_cells, 1);
        assert_eq!(report.missing_by_field["ph"], 1);
    }

    #[test]
    fn water_row_with_two_fields_kept() {
        let csv = format!("{WATER_HEADER}\nA,L,,7.2,,3.1,,,\n");
        let (records, _) = water(&csv);
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].ph, Some(7.2));
        assert_eq!(records[0].bod, Some(3.1));
        assert_eq!(records[0].conductivity, None);
    }

    #[test]
    fn negative_value_clamped_to_missing() {
        let (records, report) = air("state,location,so2,no2,rspm,spm\nA,L,-1,4.0,,\n");
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].so2, None);
        assert_eq!(records[0].no2, Some(4.0));
        assert_eq!(report.clamped_cells, 1);
    }

    #[test]
    fn ph_outside_scale_clamped_to_missing() {
        let csv = format!("{WATER_HEADER}\nA,L,6.0,15.2,,,,,\n");
        let (records, report) = water(&csv);
        assert_eq!(records[0].ph, None);
        assert_eq!(report.clamped_cells, 1);
    }

    #[test]
    fn blank_state_row_is_dropped() {
        let (records, report) = air("state,location,so2,no2,rspm,spm\n  ,L,1.0,,,\nB,L,2.0,,,\n");
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].state, "B");
        assert_eq!(report.dropped_blank_state, 1);
        assert_eq!(report.rows_read, 2);
    }

    #[test]
    fn state_key_normalization_folds_case_and_whitespace() {
        assert_eq!(normalize_state_key("  West   Bengal "), "west bengal");
        assert_eq!(normalize_state_key("WEST BENGAL"), "west bengal");
        assert_eq!(normalize_state_key("west bengal"), "west bengal");
    }

    #[test]
    fn average_two_records_hand_mean() {
        let records = vec![
            WaterRecord {
                state: "A".into(),
                location: "1".into(),
                dissolved_oxygen: None,
                ph: None,
                conductivity: None,
                bod: Some(2.0),
                nitrate: None,
                fecal_coliform: None,
                total_coliform: None,
            },
            WaterRecord {
                state: "A".into(),
                location: "2".into(),
                dissolved_oxygen: None,
                ph: None,
                conductivity: None,
                bod: Some(4.0),
                nitrate: None,
                fecal_coliform: None,
                total_coliform: None,
            },
        ];
        let aggregates = average_water_by_state(&records);
        let agg = &aggregates["a"];
        assert_eq!(agg.bod, Some(3.0));
        assert_eq!(agg.sample_count, 2);
        assert_eq!(agg.ph, None);
    }

    #[test]
    fn single_record_aggregate_is_identity() {
        let record = WaterRecord {
            state: "Solo".into(),
            location: "1".into(),
            dissolved_oxygen: Some(6.5),
            ph: Some(7.4),
            conductivity: None,
            bod: None,
            nitrate: Some(1.0),
            fecal_coliform: None,
            total_coliform: None,
        };
        let aggregates = average_water_by_state(std::slice::from_ref(&record));
        let agg = &aggregates["solo"];
        assert_eq!(agg.measurements(), record.measurements());
        assert_eq!(agg.sample_count, 1);
    }

    #[test]
    fn per_parameter_denominator_uses_present_values_only() {
        let base = WaterRecord {
            state: "A".into(),
            location: "1".into(),
            dissolved_oxygen: None,
            ph: None,
            conductivity: Some(100.0),
            bod: None,
            nitrate: None,
            fecal_coliform: None,
            total_coliform: None,
        };
        let mut with_ph = base.clone();
        with_ph.ph = Some(7.8);
        let records = vec![base.clone(), with_ph, base];
        let agg = &average_water_by_state(&records)["a"];
        // ph present in one of three records: mean over that single value.
        assert_eq!(agg.ph, Some(7.8));
        assert_eq!(agg.conductivity, Some(100.0));
        assert_eq!(agg.sample_count, 3);
    }

    #[test]
    fn empty_input_yields_empty_map() {
        assert!(average_water_by_state(&[]).is_empty());
    }

    fn arb_water_record() -> impl Strategy<Value = WaterRecord> {
        (
            prop::sample::select(vec!["A", "B", "C"]),
            prop::option::of(0.0..14.0f64),
            prop::option::of(0.0..2000.0f64),
            prop::option::of(0.0..50.0f64),
        )
            .prop_map(|(state, ph, conductivity, bod)| WaterRecord {
                state: state.to_string(),
                location: "L".into(),
                dissolved_oxygen: None,
                ph,
                conductivity,
                bod: bod.or(Some(1.0)), // keep at least one measurement present
                nitrate: None,
                fecal_coliform: None,
                total_coliform: None,
            })
    }

    proptest! {
        #[test]
        fn aggregation_is_order_independent(records in prop::collection::vec(arb_water_record(), 1..40), seed in 0u64..1000) {
            let mut shuffled = records.clone();
            // deterministic permutation derived from the seed
            let n = shuffled.len();
            let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            for i in (1..n).rev() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let j = (state >> 33) as usize % (i + 1);
                shuffled.swap(i, j);
            }
            prop_assert_eq!(average_water_by_state(&records), average_water_by_state(&shuffled));
        }

        #[test]
        fn means_lie_within_value_bounds(records in prop::collection::vec(arb_water_record(), 1..40)) {
            let aggregates = average_water_by_state(&records);
            for (key, agg) in &aggregates {
                let contributors: Vec<&WaterRecord> = records
                    .iter()
                    .filter(|r| &normalize_state_key(&r.state) == key)
                    .collect();
                for (k, mean) in agg.measurements().into_iter().enumerate() {
                    if let Some(m) = mean {
                        let values: Vec<f64> = contributors
                            .iter()
                            .filter_map(|r| r.measurements()[k])
                            .collect();
                        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
                        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                        prop_assert!(lo - 1e-12 <= m && m <= hi + 1e-12);
                    }
                }
            }
        }

        #[test]
        fn report_counts_are_conserved(rows in prop::collection::vec((any::<bool>(), any::<bool>()), 0..30)) {
            let mut csv = String::from("state,location,so2,no2,rspm,spm\n");
            for (has_state, has_value) in &rows {
                let state = if *has_state { "A" } else { "" };
                let value = if *has_value { "1.5" } else { "" };
                csv.push_str(&format!("{state},L,{value},,,\n"));
            }
            let (_, report) = air(&csv);
            prop_assert_eq!(report.rows_read, rows.len());
            prop_assert_eq!(report.rows_kept + report.rows_dropped, report.rows_read);
            prop_assert_eq!(report.rows_dropped, report.dropped_all_missing + report.dropped_blank_state);
        }
    }
}
