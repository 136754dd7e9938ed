//! From-scratch supervised learners over the six environment labels:
//! CART decision trees, a bootstrap random forest, a one-vs-rest linear
//! SVC trained with the Pegasos schedule, multinomial logistic
//! regression, and a stacking ensemble that feeds out-of-fold base
//! probabilities to a logistic meta-learner.
//!
//! All randomness flows from explicit 64-bit seeds through per-component
//! derived streams, so training is reproducible and sub-problems could
//! run in parallel without changing results.

pub mod forest;
pub mod logreg;
pub mod persist;
pub mod stacking;
pub mod svc;
pub mod tree;

use crate::error::{Error, Result};
use crate::labeler::{EnvLabel, NUM_LABELS};

/// Class-probability vector over the six labels, rank order.
pub type ClassProbs = [f64; NUM_LABELS];

/// Derives an independent seed for a tagged sub-stream of `master`.
/// SplitMix64 finalizer over the combined words.
pub(crate) fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Numerically stable softmax.
pub(crate) fn softmax(scores: &ClassProbs) -> ClassProbs {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut out = [0.0; NUM_LABELS];
    let mut sum = 0.0;
    for (o, &s) in out.iter_mut().zip(scores) {
        *o = (s - max).exp();
        sum += *o;
    }
    for o in &mut out {
        *o /= sum;
    }
    out
}

/// Hard label from a probability vector; ties go to the lower rank.
pub fn argmax_label(probs: &ClassProbs) -> EnvLabel {
    let mut best = 0;
    for (i, &p) in probs.iter().enumerate().skip(1) {
        if p > probs[best] {
            best = i;
        }
    }
    EnvLabel::ALL[best]
}

pub(crate) fn check_training_input(rows: &[Vec<f64>], labels: &[EnvLabel]) -> Result<usize> {
    if rows.is_empty() {
        return Err(Error::domain("cannot train on an empty dataset".to_string()));
    }
    if rows.len() != labels.len() {
        return Err(Error::domain(format!(
            "{} rows but {} labels",
            rows.len(),
            labels.len()
        )));
    }
    let width = rows[0].len();
    if rows.iter().any(|r| r.len() != width) {
        return Err(Error::domain("training rows have inconsistent widths".to_string()));
    }
    Ok(width)
}

pub(crate) fn check_row_width(expected: usize, row: &[f64]) -> Result<()> {
    if row.len() != expected {
        return Err(Error::domain(format!(
            "row has {} features, model expects {}",
            row.len(),
            expected
        )));
    }
    Ok(())
}
