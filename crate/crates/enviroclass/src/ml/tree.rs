//! CART decision tree: greedy binary splits minimizing weighted Gini
//! impurity, with optional random feature subsetting per node.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_row_width, check_training_input, ClassProbs};
use crate::error::Result;
use crate::labeler::{EnvLabel, NUM_LABELS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        /// Training rows routed here, per class.
        counts: [u32; NUM_LABELS],
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub root: Node,
    pub n_features: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_samples_split: usize,
    /// Features examined per split; `None` means all.
    pub features_per_split: Option<usize>,
    pub seed: u64,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: 12,
            min_samples_split: 2,
            features_per_split: None,
            seed: 0,
        }
    }
}

fn class_counts(indices: &[usize], labels: &[EnvLabel]) -> [u32; NUM_LABELS] {
    let mut counts = [0u32; NUM_LABELS];
    for &i in indices {
        counts[labels[i].index()] += 1;
    }
    counts
}

fn gini(counts: &[u32; NUM_LABELS], total: f64) -> f64 {
    let mut sum_sq = 0.0;
    for &c in counts {
        let p = c as f64 / total;
        sum_sq += p * p;
    }
    1.0 - sum_sq
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

/// Scans one feature for the threshold minimizing weighted Gini impurity.
fn best_split_on_feature(
    feature: usize,
    indices: &[usize],
    rows: &[Vec<f64>],
    labels: &[EnvLabel],
) -> Option<BestSplit> {
    let mut pairs: Vec<(f64, usize)> = indices
        .iter()
        .map(|&i| (rows[i][feature], labels[i].index()))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let n = pairs.len() as f64;
    let mut right = [0u32; NUM_LABELS];
    for &(_, class) in &pairs {
        right[class] += 1;
    }
    let mut left = [0u32; NUM_LABELS];

    let mut best: Option<BestSplit> = None;
    for k in 0..pairs.len() - 1 {
        let (value, class) = pairs[k];
        left[class] += 1;
        right[class] -= 1;
        let next_value = pairs[k + 1].0;
        if next_value <= value {
            continue; // no boundary between equal values
        }
        let n_left = (k + 1) as f64;
        let n_right = n - n_left;
        let impurity = (n_left * gini(&left, n_left) + n_right * gini(&right, n_right)) / n;
        if best.as_ref().is_none_or(|b| impurity < b.impurity) {
            best = Some(BestSplit {
                feature,
                threshold: (value + next_value) / 2.0,
                impurity,
            });
        }
    }
    best
}

fn grow(
    indices: Vec<usize>,
    rows: &[Vec<f64>],
    labels: &[EnvLabel],
    depth: usize,
    params: &TreeParams,
    n_features: usize,
    rng: &mut ChaCha8Rng,
) -> Node {
    let counts = class_counts(&indices, labels);
    let n_classes_present = counts.iter().filter(|&&c| c > 0).count();
    if depth >= params.max_depth
        || indices.len() < params.min_samples_split
        || n_classes_present <= 1
    {
        return Node::Leaf { counts };
    }

    let n_try = params
        .features_per_split
        .unwrap_or(n_features)
        .clamp(1, n_features);
    let mut candidates: Vec<usize> = if n_try == n_features {
        (0..n_features).collect()
    } else {
        sample(rng, n_features, n_try).into_vec()
    };
    candidates.sort_unstable();

    let mut best: Option<BestSplit> = None;
    for feature in candidates {
        if let Some(split) = best_split_on_feature(feature, &indices, rows, labels) {
            if best.as_ref().is_none_or(|b| split.impurity < b.impurity) {
                best = Some(split);
            }
        }
    }
    let Some(split) = best else {
        return Node::Leaf { counts }; // all candidate features constant
    };

    let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = indices
        .into_iter()
        .partition(|&i| rows[i][split.feature] <= split.threshold);
    let left = grow(left_idx, rows, labels, depth + 1, params, n_features, rng);
    let right = grow(right_idx, rows, labels, depth + 1, params, n_features, rng);
    Node::Split {
        feature: split.feature,
        threshold: split.threshold,
        left: Box::new(left),
        right: Box::new(right),
    }
}

/// Trains a CART tree.
pub fn train_tree(rows: &[Vec<f64>], labels: &[EnvLabel], params: &TreeParams) -> Result<DecisionTree> {
    let n_features = check_training_input(rows, labels)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let indices: Vec<usize> = (0..rows.len()).collect();
    let root = grow(indices, rows, labels, 0, params, n_features, &mut rng);
    Ok(DecisionTree { root, n_features })
}

/// Class probabilities for one row: normalized counts of the reached leaf.
pub fn predict_tree(tree: &DecisionTree, row: &[f64]) -> Result<ClassProbs> {
    check_row_width(tree.n_features, row)?;
    let mut node = &tree.root;
    loop {
        match node {
            Node::Leaf { counts } => {
                let total: u32 = counts.iter().sum();
                let mut probs = [0.0; NUM_LABELS];
                for (p, &c) in probs.iter_mut().zip(counts) {
                    *p = c as f64 / total as f64;
                }
                return Ok(probs);
            }
            Node::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                node = if row[*feature] <= *threshold { left } else { right };
            }
        }
    }
}
