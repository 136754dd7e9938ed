//! Stacking ensemble: forest, SVC, and logistic regression feed an
//! 18-wide vector of class probabilities (3 models × 6 classes) to a
//! logistic meta-learner. The meta-learner trains on out-of-fold base
//! predictions from a seeded stratified k-fold rotation so it never sees
//! a base model's output on that model's own training rows, then the
//! base models are retrained on the full training set.
//!
//! The ensemble owns the feature standardizer, fit on the training rows
//! it receives; test rows never influence it.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::forest::{predict_forest, train_forest, ForestParams, RandomForest};
use super::logreg::{predict_logreg, train_logreg, LogRegModel, LogRegParams};
use super::svc::{predict_svc, train_svc, SvcModel, SvcParams};
use super::{argmax_label, check_training_input, derive_seed, ClassProbs};
use crate::dataset::{fit_standardizer, Standardizer};
use crate::error::{Error, Result};
use crate::labeler::{EnvLabel, NUM_LABELS};

/// Width of the meta-learner input: three base models × six classes.
pub const META_WIDTH: usize = 3 * NUM_LABELS;

#[derive(Debug, Clone, PartialEq)]
pub struct StackingParams {
    pub k_folds: usize,
    pub seed: u64,
    pub forest: ForestParams,
    pub svc: SvcParams,
    pub logreg: LogRegParams,
}

impl Default for StackingParams {
    fn default() -> Self {
        StackingParams {
            k_folds: 5,
            seed: 0,
            forest: ForestParams::default(),
            svc: SvcParams::default(),
            logreg: LogRegParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StackingEnsemble {
    pub forest: RandomForest,
    pub svc: SvcModel,
    pub logreg: LogRegModel,
    /// Meta-learner over concatenated base probabilities.
    pub meta: LogRegModel,
    pub k_folds: usize,
    pub classes: Vec<EnvLabel>,
    pub standardizer: Standardizer,
}

/// Meta-learner input row in the declared model order.
pub(crate) fn stack_meta_row(forest: &ClassProbs, svc: &ClassProbs, logreg: &ClassProbs) -> Vec<f64> {
    let mut row = Vec::with_capacity(META_WIDTH);
    row.extend_from_slice(forest);
    row.extend_from_slice(svc);
    row.extend_from_slice(logreg);
    row
}

/// Seeded stratified folds: per class (rank order), indices are shuffled
/// and dealt round-robin with a counter that carries across classes, so
/// every fold is non-empty whenever `n >= k`.
pub(crate) fn stratified_folds(labels: &[EnvLabel], k: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut by_class: BTreeMap<u8, Vec<usize>> = BTreeMap::new();
    for (i, label) in labels.iter().enumerate() {
        by_class.entry(label.rank()).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k];
    let mut cursor = 0usize;
    for (_, mut indices) in by_class {
        indices.shuffle(&mut rng);
        for i in indices {
            folds[cursor % k].push(i);
            cursor += 1;
        }
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    folds
}

fn subset(rows: &[Vec<f64>], labels: &[EnvLabel], indices: &[usize]) -> (Vec<Vec<f64>>, Vec<EnvLabel>) {
    (
        indices.iter().map(|&i| rows[i].clone()).collect(),
        indices.iter().map(|&i| labels[i]).collect(),
    )
}

fn base_probs(
    forest: &RandomForest,
    svc: &SvcModel,
    logreg: &LogRegModel,
    row: &[f64],
) -> Result<Vec<f64>> {
    let f = predict_forest(forest, row)?;
    let s = predict_svc(svc, row)?;
    let l = predict_logreg(logreg, row)?;
    Ok(stack_meta_row(&f, &s, &l))
}

/// Trains the full ensemble on (unstandardized) training rows.
pub fn train_stacking(
    rows: &[Vec<f64>],
    labels: &[EnvLabel],
    params: &StackingParams,
) -> Result<StackingEnsemble> {
    let n = rows.len();
    check_training_input(rows, labels)?;
    if params.k_folds < 2 {
        return Err(Error::domain(format!(
            "stacking needs at least 2 folds, got {}",
            params.k_folds
        )));
    }
    if params.k_folds > n {
        return Err(Error::domain(format!(
            "{} folds exceed {} training rows",
            params.k_folds, n
        )));
    }

    let standardizer = fit_standardizer(rows);
    let x: Vec<Vec<f64>> = rows.iter().map(|r| standardizer.apply_row(r)).collect();

    // out-of-fold meta-features
    let folds = stratified_folds(labels, params.k_folds, derive_seed(params.seed, 0));
    let mut meta_rows = vec![Vec::new(); n];
    for (j, fold) in folds.iter().enumerate() {
        if fold.is_empty() {
            continue;
        }
        let train_idx: Vec<usize> = (0..n).filter(|i| !fold.contains(i)).collect();
        let (fold_rows, fold_labels) = subset(&x, labels, &train_idx);

        let forest = train_forest(
            &fold_rows,
            &fold_labels,
            &ForestParams {
                seed: derive_seed(params.seed, 1000 + j as u64),
                ..params.forest.clone()
            },
        )?;
        let svc = train_svc(
            &fold_rows,
            &fold_labels,
            &SvcParams {
                seed: derive_seed(params.seed, 2000 + j as u64),
                ..params.svc.clone()
            },
        )?;
        let logreg = train_logreg(&fold_rows, &fold_labels, &params.logreg)?;

        for &i in fold {
            meta_rows[i] = base_probs(&forest, &svc, &logreg, &x[i])?;
        }
    }

    let meta = train_logreg(&meta_rows, labels, &params.logreg)?;

    // final base models on the full training set
    let forest = train_forest(
        &x,
        labels,
        &ForestParams {
            seed: derive_seed(params.seed, 1),
            ..params.forest.clone()
        },
    )?;
    let svc = train_svc(
        &x,
        labels,
        &SvcParams {
            seed: derive_seed(params.seed, 2),
            ..params.svc.clone()
        },
    )?;
    let logreg = train_logreg(&x, labels, &params.logreg)?;

    Ok(StackingEnsemble {
        forest,
        svc,
        logreg,
        meta,
        k_folds: params.k_folds,
        classes: EnvLabel::ALL.to_vec(),
        standardizer,
    })
}

/// Predicts one raw (unstandardized) row.
pub fn predict_stacking(ensemble: &StackingEnsemble, row: &[f64]) -> Result<(EnvLabel, ClassProbs)> {
    let x = ensemble.standardizer.apply_row(row);
    let meta_in = base_probs(&ensemble.forest, &ensemble.svc, &ensemble.logreg, &x)?;
    let probs = predict_logreg(&ensemble.meta, &meta_in)?;
    Ok((argmax_label(&probs), probs))
}
