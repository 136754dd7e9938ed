//! Multinomial logistic regression trained by full-batch gradient
//! descent on the cross-entropy objective with L2 weight decay
//! (biases are not regularized). Weights start at zero, so training is
//! deterministic with no seed. Expects standardized features.

use serde::{Deserialize, Serialize};

use super::{check_row_width, check_training_input, softmax, ClassProbs};
use crate::error::Result;
use crate::labeler::{EnvLabel, NUM_LABELS};

#[derive(Debug, Clone, PartialEq)]
pub struct LogRegParams {
    pub l2: f64,
    pub learning_rate: f64,
    pub epochs: usize,
}

impl Default for LogRegParams {
    fn default() -> Self {
        LogRegParams {
            l2: 1e-4,
            learning_rate: 0.3,
            epochs: 400,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRegModel {
    /// Class-major weight matrix, `NUM_LABELS` × features.
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
    pub l2: f64,
    pub learning_rate: f64,
    pub epochs: usize,
}

fn scores(weights: &[Vec<f64>], biases: &[f64], row: &[f64]) -> ClassProbs {
    let mut z = [0.0; NUM_LABELS];
    for (zc, (w, &b)) in z.iter_mut().zip(weights.iter().zip(biases)) {
        *zc = w.iter().zip(row).map(|(wj, xj)| wj * xj).sum::<f64>() + b;
    }
    z
}

/// Mean cross-entropy plus (l2/2)·‖W‖².
pub fn loss(
    weights: &[Vec<f64>],
    biases: &[f64],
    rows: &[Vec<f64>],
    labels: &[EnvLabel],
    l2: f64,
) -> f64 {
    let mut total = 0.0;
    for (row, label) in rows.iter().zip(labels) {
        let z = scores(weights, biases, row);
        let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let log_sum: f64 = z.iter().map(|&v| (v - max).exp()).sum::<f64>().ln() + max;
        total += log_sum - z[label.index()];
    }
    let reg: f64 = weights.iter().flatten().map(|w| w * w).sum();
    total / rows.len() as f64 + 0.5 * l2 * reg
}

/// Analytic gradient of [`loss`] with respect to weights and biases.
pub fn gradient(
    weights: &[Vec<f64>],
    biases: &[f64],
    rows: &[Vec<f64>],
    labels: &[EnvLabel],
    l2: f64,
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let width = rows[0].len();
    let n = rows.len() as f64;
    let mut grad_w = vec![vec![0.0; width]; NUM_LABELS];
    let mut grad_b = vec![0.0; NUM_LABELS];
    for (row, label) in rows.iter().zip(labels) {
        let probs = softmax(&scores(weights, biases, row));
        for c in 0..NUM_LABELS {
            let delta = probs[c] - if c == label.index() { 1.0 } else { 0.0 };
            for (g, &x) in grad_w[c].iter_mut().zip(row) {
                *g += delta * x;
            }
            grad_b[c] += delta;
        }
    }
    for (gw, w) in grad_w.iter_mut().zip(weights) {
        for (g, &wj) in gw.iter_mut().zip(w) {
            *g = *g / n + l2 * wj;
        }
    }
    for g in &mut grad_b {
        *g /= n;
    }
    (grad_w, grad_b)
}

/// Trains by full-batch gradient descent from zero initialization.
pub fn train_logreg(rows: &[Vec<f64>], labels: &[EnvLabel], params: &LogRegParams) -> Result<LogRegModel> {
    let width = check_training_input(rows, labels)?;
    let mut weights = vec![vec![0.0; width]; NUM_LABELS];
    let mut biases = vec![0.0; NUM_LABELS];
    for _ in 0..params.epochs {
        let (grad_w, grad_b) = gradient(&weights, &biases, rows, labels, params.l2);
        for (w, gw) in weights.iter_mut().zip(&grad_w) {
            for (wj, gj) in w.iter_mut().zip(gw) {
                *wj -= params.learning_rate * gj;
            }
        }
        for (b, gb) in biases.iter_mut().zip(&grad_b) {
            *b -= params.learning_rate * gb;
        }
    }
    Ok(LogRegModel {
        weights,
        biases,
        l2: params.l2,
        learning_rate: params.learning_rate,
        epochs: params.epochs,
    })
}

/// softmax(Wx + b).
pub fn predict_logreg(model: &LogRegModel, row: &[f64]) -> Result<ClassProbs> {
    check_row_width(model.weights[0].len(), row)?;
    Ok(softmax(&scores(&model.weights, &model.biases, row)))
}
