//! Random forest: bootstrap-resampled CART trees with √d feature
//! subsetting, averaged into class probabilities.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tree::{predict_tree, train_tree, DecisionTree, TreeParams};
use super::{check_training_input, derive_seed, ClassProbs};
use crate::error::{Error, Result};
use crate::labeler::{EnvLabel, NUM_LABELS};

#[derive(Debug, Clone, PartialEq)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_split: usize,
    /// Features examined per split; `None` means ⌈√d⌉.
    pub features_per_split: Option<usize>,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 10,
            max_depth: 12,
            min_samples_split: 2,
            features_per_split: None,
            bootstrap: true,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<DecisionTree>,
    /// Seed that drove each tree's bootstrap and feature sampling.
    pub tree_seeds: Vec<u64>,
    pub features_per_split: usize,
    pub n_features: usize,
}

impl RandomForest {
    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }
}

/// Trains `n_trees` CART trees, each on its own bootstrap resample.
pub fn train_forest(rows: &[Vec<f64>], labels: &[EnvLabel], params: &ForestParams) -> Result<RandomForest> {
    let n_features = check_training_input(rows, labels)?;
    if params.n_trees == 0 {
        return Err(Error::domain("forest needs at least one tree".to_string()));
    }
    let features_per_split = params
        .features_per_split
        .unwrap_or_else(|| (n_features as f64).sqrt().ceil() as usize)
        .clamp(1, n_features);

    let n = rows.len();
    let mut trees = Vec::with_capacity(params.n_trees);
    let mut tree_seeds = Vec::with_capacity(params.n_trees);
    for t in 0..params.n_trees {
        let tree_seed = derive_seed(params.seed, t as u64);
        tree_seeds.push(tree_seed);

        let tree_params = TreeParams {
            max_depth: params.max_depth,
            min_samples_split: params.min_samples_split,
            features_per_split: Some(features_per_split),
            seed: derive_seed(tree_seed, 1),
        };

        let tree = if params.bootstrap {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(tree_seed, 0));
            let mut sample_rows = Vec::with_capacity(n);
            let mut sample_labels = Vec::with_capacity(n);
            for _ in 0..n {
                let i = rng.gen_range(0..n);
                sample_rows.push(rows[i].clone());
                sample_labels.push(labels[i]);
            }
            train_tree(&sample_rows, &sample_labels, &tree_params)?
        } else {
            train_tree(rows, labels, &tree_params)?
        };
        trees.push(tree);
    }

    Ok(RandomForest {
        trees,
        tree_seeds,
        features_per_split,
        n_features,
    })
}

/// Mean of the per-tree probability vectors.
pub fn predict_forest(forest: &RandomForest, row: &[f64]) -> Result<ClassProbs> {
    let mut sum = [0.0; NUM_LABELS];
    for tree in &forest.trees {
        let probs = predict_tree(tree, row)?;
        for (s, p) in sum.iter_mut().zip(&probs) {
            *s += p;
        }
    }
    for s in &mut sum {
        *s /= forest.trees.len() as f64;
    }
    Ok(sum)
}
