//! Feature matrix assembly: the state join, label attachment, mean
//! imputation, standardization, and reproducible train/test splits.
//!
//! The water dataset is averaged per state while air rows keep their
//! original granularity, so the join is one-to-many: every air row
//! inherits its state's water aggregate. Missing cells are carried as
//! NaN until [`impute_missing`] replaces them with feature means.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indices::{AqiResult, WqiResult};
use crate::ingest::{normalize_state_key, AirRecord, WaterAggregate, AIR_FIELDS, WATER_FIELDS};
use crate::labeler::{combine, EnvLabel};

/// Sentinel for a missing cell.
pub fn missing() -> f64 {
    f64::NAN
}

/// Whether a cell is missing.
pub fn is_missing(value: f64) -> bool {
    value.is_nan()
}

/// State-level numeric features with optional aligned labels.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub feature_names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Option<Vec<EnvLabel>>,
    pub state_keys: Vec<String>,
}

impl FeatureMatrix {
    pub fn new(
        feature_names: Vec<String>,
        rows: Vec<Vec<f64>>,
        labels: Option<Vec<EnvLabel>>,
        state_keys: Vec<String>,
    ) -> Result<FeatureMatrix> {
        if rows.len() != state_keys.len() {
            return Err(Error::Consistency(format!(
                "{} rows but {} state keys",
                rows.len(),
                state_keys.len()
            )));
        }
        if let Some(labels) = &labels {
            if labels.len() != rows.len() {
                return Err(Error::Consistency(format!(
                    "{} rows but {} labels",
                    rows.len(),
                    labels.len()
                )));
            }
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != feature_names.len()) {
            return Err(Error::Consistency(format!(
                "row has {} values but {} features are declared",
                bad.len(),
                feature_names.len()
            )));
        }
        Ok(FeatureMatrix {
            feature_names,
            rows,
            labels,
            state_keys,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// One feature column by index.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    /// Shallow row-subset copy preserving labels and keys.
    fn select_rows(&self, indices: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            feature_names: self.feature_names.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: self
                .labels
                .as_ref()
                .map(|l| indices.iter().map(|&i| l[i]).collect()),
            state_keys: indices.iter().map(|&i| self.state_keys[i].clone()).collect(),
        }
    }
}

/// Outcome counters for the state join.
#[derive(Debug, Clone, PartialEq)]
pub struct JoinReport {
    pub joined_rows: usize,
    /// Air rows whose state has no water aggregate.
    pub dropped_air_rows: usize,
    /// Indices into the input air slice for the rows that joined, in order.
    pub kept_air_indices: Vec<usize>,
}

/// Joins air rows with per-state water aggregates (one-to-many).
///
/// Errors with [`Error::NoOverlap`] when both inputs are non-empty yet no
/// air row finds its state in the water map.
pub fn join_by_state(
    air: &[AirRecord],
    water: &BTreeMap<String, WaterAggregate>,
) -> Result<(FeatureMatrix, JoinReport)> {
    let feature_names: Vec<String> = AIR_FIELDS
        .iter()
        .chain(WATER_FIELDS.iter())
        .map(|s| s.to_string())
        .collect();

    let mut rows = Vec::new();
    let mut state_keys = Vec::new();
    let mut kept_air_indices = Vec::new();
    let mut dropped_air_rows = 0usize;

    for (i, record) in air.iter().enumerate() {
        let key = normalize_state_key(&record.state);
        let Some(aggregate) = water.get(&key) else {
            dropped_air_rows += 1;
            continue;
        };
        let mut row = Vec::with_capacity(feature_names.len());
        row.extend(record.measurements().into_iter().map(|v| v.unwrap_or(f64::NAN)));
        row.extend(aggregate.measurements().into_iter().map(|v| v.unwrap_or(f64::NAN)));
        rows.push(row);
        state_keys.push(key);
        kept_air_indices.push(i);
    }

    if rows.is_empty() && !air.is_empty() && !water.is_empty() {
        return Err(Error::NoOverlap);
    }

    let report = JoinReport {
        joined_rows: rows.len(),
        dropped_air_rows,
        kept_air_indices,
    };
    let matrix = FeatureMatrix::new(feature_names, rows, None, state_keys)?;
    Ok((matrix, report))
}

/// Attaches overall labels: row label = combine(row AQI category, state
/// WQI category).
pub fn attach_labels(
    matrix: &FeatureMatrix,
    aqi_per_row: &[AqiResult],
    wqi_per_state: &BTreeMap<String, WqiResult>,
) -> Result<FeatureMatrix> {
    if aqi_per_row.len() != matrix.n_rows() {
        return Err(Error::Consistency(format!(
            "{} air index results for {} rows",
            aqi_per_row.len(),
            matrix.n_rows()
        )));
    }
    let mut labels = Vec::with_capacity(matrix.n_rows());
    for (key, aqi) in matrix.state_keys.iter().zip(aqi_per_row) {
        let wqi = wqi_per_state.get(key).ok_or_else(|| {
            Error::Consistency(format!("no water index for state `{key}`"))
        })?;
        labels.push(combine(aqi.category, wqi.category));
    }
    let mut labeled = matrix.clone();
    labeled.labels = Some(labels);
    Ok(labeled)
}

/// What imputation changed.
#[derive(Debug, Clone, PartialEq)]
pub struct ImputeReport {
    pub imputed_cells: usize,
    /// Features removed because no row had a value.
    pub removed_features: Vec<String>,
}

/// Replaces each missing cell with its feature's mean over present cells.
/// Features missing in every row are removed.
pub fn impute_missing(matrix: &FeatureMatrix) -> (FeatureMatrix, ImputeReport) {
    if matrix.rows.is_empty() {
        return (
            matrix.clone(),
            ImputeReport {
                imputed_cells: 0,
                removed_features: Vec::new(),
            },
        );
    }

    let mut keep = Vec::new();
    let mut removed_features = Vec::new();
    let mut means = Vec::new();
    for j in 0..matrix.n_features() {
        let column = matrix.column(j);
        let present: Vec<f64> = column.iter().copied().filter(|v| !is_missing(*v)).collect();
        if present.is_empty() {
            removed_features.push(matrix.feature_names[j].clone());
        } else {
            keep.push(j);
            means.push(present.iter().sum::<f64>() / present.len() as f64);
        }
    }

    let mut imputed_cells = 0usize;
    let rows: Vec<Vec<f64>> = matrix
        .rows
        .iter()
        .map(|row| {
            keep.iter()
                .zip(&means)
                .map(|(&j, &mean)| {
                    if is_missing(row[j]) {
                        imputed_cells += 1;
                        mean
                    } else {
                        row[j]
                    }
                })
                .collect()
        })
        .collect();

    let feature_names = keep.iter().map(|&j| matrix.feature_names[j].clone()).collect();
    let imputed = FeatureMatrix {
        feature_names,
        rows,
        labels: matrix.labels.clone(),
        state_keys: matrix.state_keys.clone(),
    };
    (
        imputed,
        ImputeReport {
            imputed_cells,
            removed_features,
        },
    )
}

/// Per-feature location/scale statistics fit on training rows only.
///
/// Uses the population standard deviation; constant features store a
/// standard deviation of 1 so they transform to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    pub fn apply_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(&v, (&mean, &std))| (v - mean) / std)
            .collect()
    }
}

/// Fits a standardizer on the given (training) rows.
pub fn fit_standardizer(rows: &[Vec<f64>]) -> Standardizer {
    if rows.is_empty() {
        return Standardizer {
            means: Vec::new(),
            stds: Vec::new(),
        };
    }
    let d = rows[0].len();
    let n = rows.len() as f64;
    let mut means = vec![0.0; d];
    for row in rows {
        for (m, &v) in means.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut means {
        *m /= n;
    }
    let mut stds = vec![0.0; d];
    for row in rows {
        for (s, (&v, &m)) in stds.iter_mut().zip(row.iter().zip(&means)) {
            *s += (v - m) * (v - m);
        }
    }
    for s in &mut stds {
        *s = (*s / n).sqrt();
        if *s == 0.0 {
            *s = 1.0;
        }
    }
    Standardizer { means, stds }
}

/// Applies stored statistics to a batch of rows.
pub fn apply_standardizer(standardizer: &Standardizer, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    rows.iter().map(|r| standardizer.apply_row(r)).collect()
}

/// Train/test split parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_fraction: 0.8,
            seed: 0,
            stratified: true,
        }
    }
}

/// A completed split. Warnings report degenerate classes.
#[derive(Debug, Clone)]
pub struct Split {
    pub train: FeatureMatrix,
    pub test: FeatureMatrix,
    pub warnings: Vec<String>,
}

/// Deterministic seeded train/test split.
///
/// Non-stratified mode shuffles all rows and takes `round(fraction·N)`
/// for training. Stratified mode allocates per-class training counts by
/// largest-remainder rounding against the same total, keeping every
/// class's train share within one row of its quota; single-row classes
/// go to train with a warning.
pub fn train_test_split(matrix: &FeatureMatrix, spec: &SplitSpec) -> Result<Split> {
    let n = matrix.n_rows();
    if n < 2 {
        return Err(Error::domain(format!("cannot split {n} rows")));
    }
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(Error::domain(format!(
            "train fraction must lie in (0, 1), got {}",
            spec.train_fraction
        )));
    }

    let target = (spec.train_fraction * n as f64).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut warnings = Vec::new();

    let train_indices: Vec<usize> = if spec.stratified {
        let labels = matrix.labels.as_ref().ok_or_else(|| {
            Error::domain("stratified split requires a labeled matrix".to_string())
        })?;

        // group rows by class, in rank order
        let mut by_class: BTreeMap<u8, Vec<usize>> = BTreeMap::new();
        for (i, label) in labels.iter().enumerate() {
            by_class.entry(label.rank()).or_default().push(i);
        }

        struct ClassAlloc {
            rank: u8,
            indices: Vec<usize>,
            quota: f64,
            take: usize,
            singleton: bool,
        }
        let mut allocs: Vec<ClassAlloc> = Vec::new();
        for (rank, indices) in by_class {
            let count = indices.len();
            let quota = spec.train_fraction * count as f64;
            if count == 1 {
                warnings.push(format!(
                    "class {} has a single row; assigned to train",
                    EnvLabel::from_rank(rank).unwrap()
                ));
                allocs.push(ClassAlloc {
                    rank,
                    indices,
                    quota,
                    take: 1,
                    singleton: true,
                });
            } else {
                allocs.push(ClassAlloc {
                    rank,
                    indices,
                    quota,
                    take: quota.floor() as usize,
                    singleton: false,
                });
            }
        }

        // largest-remainder rounding toward the overall target; every
        // class ends at floor(quota) or ceil(quota), i.e. within one row
        let mut total: usize = allocs.iter().map(|a| a.take).sum();
        let mut order: Vec<usize> = (0..allocs.len()).collect();
        order.sort_by(|&x, &y| {
            let rx = allocs[x].quota - allocs[x].quota.floor();
            let ry = allocs[y].quota - allocs[y].quota.floor();
            ry.partial_cmp(&rx)
                .unwrap()
                .then(allocs[x].rank.cmp(&allocs[y].rank))
        });
        for &k in &order {
            if total >= target {
                break;
            }
            let a = &mut allocs[k];
            if !a.singleton && a.take < a.indices.len() {
                a.take += 1;
                total += 1;
            }
        }
        for &k in order.iter().rev() {
            if total <= target {
                break;
            }
            let a = &mut allocs[k];
            if !a.singleton && a.take > 0 {
                a.take -= 1;
                total -= 1;
            }
        }

        // best-effort repair: keep multi-row classes on both sides, but
        // only via moves that stay within one row of each quota
        for x in 0..allocs.len() {
            if allocs[x].singleton {
                continue;
            }
            if allocs[x].take == allocs[x].indices.len() {
                // class fully in train; hand one seat to a floor-level class
                for &y in &order {
                    if y == x || allocs[y].singleton {
                        continue;
                    }
                    let at_floor = allocs[y].take == allocs[y].quota.floor() as usize;
                    if at_floor && allocs[y].take + 1 < allocs[y].indices.len() {
                        allocs[x].take -= 1;
                        allocs[y].take += 1;
                        break;
                    }
                }
            } else if allocs[x].take == 0 {
                // class absent from train; take a seat from a ceil-level class
                for &y in &order {
                    if y == x || allocs[y].singleton {
                        continue;
                    }
                    let at_ceil = allocs[y].take > allocs[y].quota.floor() as usize;
                    if at_ceil && allocs[y].take > 1 {
                        allocs[y].take -= 1;
                        allocs[x].take += 1;
                        break;
                    }
                }
            }
        }

        let mut train = Vec::with_capacity(total);
        for a in &mut allocs {
            a.indices.shuffle(&mut rng);
            train.extend_from_slice(&a.indices[..a.take]);
        }
        train
    } else {
        let mut indices: Vec<usize> = (0..n).collect();
        indices.shuffle(&mut rng);
        indices.truncate(target);
        indices
    };

    let mut train_sorted = train_indices;
    train_sorted.sort_unstable();
    let mut in_train = vec![false; n];
    for &i in &train_sorted {
        in_train[i] = true;
    }
    let test_sorted: Vec<usize> = (0..n).filter(|&i| !in_train[i]).collect();

    Ok(Split {
        train: matrix.select_rows(&train_sorted),
        test: matrix.select_rows(&test_sorted),
        warnings,
    })
}
