//! Synthetic source-data generator.
//!
//! Emits paired air/water CSVs in the default source-column layout whose
//! states cycle through seven (air band, water band) targets, spanning
//! every index band on both scales and yielding all six overall labels.
//! Values are placed inside band interiors by inverting the index
//! tables, so the labels derived downstream are a deterministic function
//! of the written measurements.

use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::csvio::{create, fmt_float};
use crate::error::Result;
use crate::indices::{
    concentration_for_subindex, value_for_rating, AirCategory, Pollutant, WaterCategory,
    WaterParameter,
};
use crate::ingest::{AirColumnMapping, WaterColumnMapping};

/// Sampling interval of index points per air band, kept clear of edges.
fn air_band_range(category: AirCategory) -> (f64, f64) {
    match category {
        AirCategory::Good => (5.0, 45.0),
        AirCategory::Satisfactory => (55.0, 95.0),
        AirCategory::Moderate => (110.0, 190.0),
        AirCategory::Poor => (210.0, 290.0),
        AirCategory::VeryPoor => (310.0, 390.0),
        AirCategory::Severe => (410.0, 480.0),
    }
}

/// Sampling interval of index points per water band.
fn water_band_range(category: WaterCategory) -> (f64, f64) {
    match category {
        WaterCategory::Excellent => (3.0, 22.0),
        WaterCategory::Good => (28.0, 47.0),
        WaterCategory::Satisfactory => (53.0, 72.0),
        WaterCategory::Poor => (78.0, 97.0),
        WaterCategory::Severe => (105.0, 130.0),
    }
}

/// State targets, cycled; covers all six air bands, all five water
/// bands, and all six combined labels.
const TARGETS: [(AirCategory, WaterCategory); 7] = [
    (AirCategory::Good, WaterCategory::Excellent),
    (AirCategory::Satisfactory, WaterCategory::Satisfactory),
    (AirCategory::Moderate, WaterCategory::Good),
    (AirCategory::Poor, WaterCategory::Poor),
    (AirCategory::VeryPoor, WaterCategory::Poor),
    (AirCategory::Severe, WaterCategory::Severe),
    (AirCategory::Good, WaterCategory::Good),
];

const AIR_ROWS_PER_STATE: usize = 3;
const WATER_RECORDS_PER_STATE: usize = 4;

fn round3(value: f64) -> f64 {
    (value * 1000.0).round() / 1000.0
}

/// Writes `n_rows` air observations plus the matching water records.
pub fn generate(air_path: &Path, water_path: &Path, n_rows: usize, seed: u64) -> Result<()> {
    let air_map = AirColumnMapping::default();
    let water_map = WaterColumnMapping::default();

    let mut air = create(air_path)?;
    air.write_record([
        air_map.state.as_str(),
        air_map.location.as_str(),
        air_map.so2.as_str(),
        air_map.no2.as_str(),
        air_map.rspm.as_str(),
        air_map.spm.as_str(),
    ])?;

    let mut water = create(water_path)?;
    water.write_record([
        water_map.state.as_str(),
        water_map.location.as_str(),
        water_map.dissolved_oxygen.as_str(),
        water_map.ph.as_str(),
        water_map.conductivity.as_str(),
        water_map.bod.as_str(),
        water_map.nitrate.as_str(),
        water_map.fecal_coliform.as_str(),
        water_map.total_coliform.as_str(),
    ])?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows_left = n_rows;
    let mut state_index = 0usize;
    let mut air_row = 0usize;

    while rows_left > 0 {
        let (air_target, water_target) = TARGETS[state_index % TARGETS.len()];
        // the two datasets intentionally disagree on casing; the join key
        // normalization reconciles them
        let air_state = format!("Area {state_index:04}");
        let water_state = format!("AREA {state_index:04}");

        let rows_here = rows_left.min(AIR_ROWS_PER_STATE);
        let (aqi_lo, aqi_hi) = air_band_range(air_target);
        for _ in 0..rows_here {
            let target_index = rng.gen_range(aqi_lo..aqi_hi);
            // rspm carries the target index; the others sit strictly below
            // it so the maximum stays where intended
            let so2 = round3(concentration_for_subindex(Pollutant::So2, 0.50 * target_index));
            let no2 = round3(concentration_for_subindex(Pollutant::No2, 0.35 * target_index));
            let rspm = round3(concentration_for_subindex(Pollutant::Rspm, target_index));
            let spm = round3(concentration_for_subindex(Pollutant::Spm, 0.75 * target_index));
            air.write_record([
                air_state.as_str(),
                &format!("site-{air_row}"),
                &fmt_float(so2),
                &fmt_float(no2),
                &fmt_float(rspm),
                &fmt_float(spm),
            ])?;
            air_row += 1;
        }
        rows_left -= rows_here;

        // every parameter carries the same target rating, so the weighted
        // index of the state mean equals the target; jitter comes in
        // cancelling pairs to keep the mean exact
        let (wqi_lo, wqi_hi) = water_band_range(water_target);
        let target_rating = rng.gen_range(wqi_lo..wqi_hi);
        let base: Vec<f64> = WaterParameter::ALL
            .into_iter()
            .map(|p| value_for_rating(p, target_rating))
            .collect();
        for pair in 0..WATER_RECORDS_PER_STATE / 2 {
            let jitter = rng.gen_range(0.005..0.02);
            for sign in [1.0, -1.0] {
                let record: Vec<String> = base
                    .iter()
                    .map(|v| fmt_float(round3(v * (1.0 + sign * jitter))))
                    .collect();
                let location = format!("w{}-{}", state_index, pair * 2 + usize::from(sign < 0.0));
                let mut full = vec![water_state.clone(), location];
                full.extend(record);
                water.write_record(&full)?;
            }
        }

        state_index += 1;
    }

    air.flush()?;
    water.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indices::{compute_aqi, compute_wqi};
    use crate::ingest::{average_water_by_state, parse_air_csv, parse_water_csv};
    use crate::labeler::{combine, EnvLabel};
    use std::collections::BTreeMap;

    fn generate_to_strings(n_rows: usize, seed: u64) -> (String, String) {
        let dir = tempfile::tempdir().unwrap();
        let air = dir.path().join("air.csv");
        let water = dir.path().join("water.csv");
        generate(&air, &water, n_rows, seed).unwrap();
        (
            std::fs::read_to_string(air).unwrap(),
            std::fs::read_to_string(water).unwrap(),
        )
    }

    #[test]
    fn fixed_seed_reproduces_files() {
        let (a1, w1) = generate_to_strings(60, 42);
        let (a2, w2) = generate_to_strings(60, 42);
        assert_eq!(a1, a2);
        assert_eq!(w1, w2);
        let (a3, _) = generate_to_strings(60, 43);
        assert_ne!(a1, a3);
    }

    #[test]
    fn zero_rows_gives_header_only_files() {
        let (a, w) = generate_to_strings(0, 1);
        assert_eq!(a.lines().count(), 1);
        assert_eq!(w.lines().count(), 1);
    }

    #[test]
    fn six_hundred_rows_cover_all_labels_generously() {
        let (air_csv, water_csv) = generate_to_strings(600, 42);
        let (air_records, air_report) =
            parse_air_csv(air_csv.as_bytes(), &AirColumnMapping::default()).unwrap();
        let (water_records, _) =
            parse_water_csv(water_csv.as_bytes(), &WaterColumnMapping::default()).unwrap();
        assert_eq!(air_report.rows_kept, 600);

        let aggregates = average_water_by_state(&water_records);
        let mut histogram: BTreeMap<EnvLabel, usize> = BTreeMap::new();
        for record in &air_records {
            let aqi = compute_aqi(record).unwrap();
            let key = crate::ingest::normalize_state_key(&record.state);
            let wqi = compute_wqi(&aggregates[&key]).unwrap();
            *histogram.entry(combine(aqi.category, wqi.category)).or_default() += 1;
        }
        assert_eq!(histogram.len(), 6, "labels seen: {histogram:?}");
        for (label, count) in &histogram {
            assert!(*count >= 20, "label {label} has only {count} rows");
        }
    }
}
