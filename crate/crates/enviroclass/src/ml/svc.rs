//! One-vs-rest linear SVC trained by the Pegasos stochastic subgradient
//! schedule (step size 1/(λt)): per class, minimize
//! (λ/2)‖w‖² + mean(max(0, 1 − y·(w·x + b))) with y = ±1.
//!
//! The stored detector is the running average of the iterates, which
//! smooths the single-sample jitter of the raw Pegasos path; the
//! per-epoch objective of the averaged iterate settles monotonically.
//!
//! Margins are converted to class probabilities by softmax. Expects
//! standardized features.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_row_width, check_training_input, derive_seed, softmax, ClassProbs};
use crate::error::Result;
use crate::labeler::{EnvLabel, NUM_LABELS};

#[derive(Debug, Clone, PartialEq)]
pub struct SvcParams {
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SvcParams {
    fn default() -> Self {
        SvcParams {
            lambda: 0.01,
            epochs: 50,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvcModel {
    /// One weight vector per class, rank order.
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Regularized hinge objective for one detector.
pub fn hinge_objective(
    weights: &[f64],
    bias: f64,
    lambda: f64,
    rows: &[Vec<f64>],
    targets: &[f64],
) -> f64 {
    let reg = 0.5 * lambda * dot(weights, weights);
    let loss: f64 = rows
        .iter()
        .zip(targets)
        .map(|(row, &y)| (1.0 - y * (dot(weights, row) + bias)).max(0.0))
        .sum();
    reg + loss / rows.len() as f64
}

/// Trains the one-vs-rest detectors, also returning the per-class,
/// per-epoch objective trace for convergence checks.
pub fn train_svc_traced(
    rows: &[Vec<f64>],
    labels: &[EnvLabel],
    params: &SvcParams,
) -> Result<(SvcModel, Vec<Vec<f64>>)> {
    let width = check_training_input(rows, labels)?;

    let mut distinct = [false; NUM_LABELS];
    for label in labels {
        distinct[label.index()] = true;
    }
    let n_distinct = distinct.iter().filter(|&&d| d).count();

    let mut weights = vec![vec![0.0; width]; NUM_LABELS];
    let mut biases = vec![0.0; NUM_LABELS];
    let mut traces = vec![Vec::new(); NUM_LABELS];

    if n_distinct == 1 {
        // no negatives to separate from: fixed biases decide directly
        let only = labels[0].index();
        for (c, bias) in biases.iter_mut().enumerate() {
            *bias = if c == only { 1.0 } else { -1.0 };
        }
        let model = SvcModel {
            weights,
            biases,
            lambda: params.lambda,
            epochs: params.epochs,
            seed: params.seed,
        };
        return Ok((model, traces));
    }

    let n = rows.len();
    for class in 0..NUM_LABELS {
        let targets: Vec<f64> = labels
            .iter()
            .map(|l| if l.index() == class { 1.0 } else { -1.0 })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(params.seed, class as u64));
        let mut w = vec![0.0; width];
        let mut b = 0.0;
        let mut avg_w = vec![0.0; width];
        let mut avg_b = 0.0;
        let mut order: Vec<usize> = (0..n).collect();
        let mut t = 0u64;
        for _ in 0..params.epochs {
            order.shuffle(&mut rng);
            for &i in &order {
                t += 1;
                let eta = 1.0 / (params.lambda * t as f64);
                let y = targets[i];
                let margin = y * (dot(&w, &rows[i]) + b);
                let shrink = 1.0 - eta * params.lambda;
                if margin < 1.0 {
                    for (wj, xj) in w.iter_mut().zip(&rows[i]) {
                        *wj = shrink * *wj + eta * y * xj;
                    }
                    b += eta * y;
                } else {
                    for wj in w.iter_mut() {
                        *wj *= shrink;
                    }
                }
                let inv_t = 1.0 / t as f64;
                for (aj, &wj) in avg_w.iter_mut().zip(&w) {
                    *aj += (wj - *aj) * inv_t;
                }
                avg_b += (b - avg_b) * inv_t;
            }
            traces[class].push(hinge_objective(&avg_w, avg_b, params.lambda, rows, &targets));
        }
        weights[class] = avg_w;
        biases[class] = avg_b;
    }

    let model = SvcModel {
        weights,
        biases,
        lambda: params.lambda,
        epochs: params.epochs,
        seed: params.seed,
    };
    Ok((model, traces))
}

/// Trains the one-vs-rest detectors.
pub fn train_svc(rows: &[Vec<f64>], labels: &[EnvLabel], params: &SvcParams) -> Result<SvcModel> {
    train_svc_traced(rows, labels, params).map(|(model, _)| model)
}

/// Softmax over the per-class margins.
pub fn predict_svc(model: &SvcModel, row: &[f64]) -> Result<ClassProbs> {
    check_row_width(model.weights[0].len(), row)?;
    let mut margins = [0.0; NUM_LABELS];
    for (m, (w, &b)) in margins.iter_mut().zip(model.weights.iter().zip(&model.biases)) {
        *m = dot(w, row) + b;
    }
    Ok(softmax(&margins))
}
