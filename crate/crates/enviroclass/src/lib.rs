//! Fuses air-quality and water-quality observations into a state-level
//! feature matrix, assigns six-level environmental-health labels from an
//! air-weighted rule table over the two index scales, trains a stacking
//! ensemble (random forest, linear SVC, logistic regression, logistic
//! meta-learner) from scratch, and evaluates it with accuracy, confusion
//! matrices, and Pearson feature rankings.
//!
//! The `cli` module drives the whole pipeline; the other modules are
//! usable as a library. All training and splitting is deterministic
//! under an explicit seed.

pub mod cli;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod indices;
pub mod ingest;
pub mod labeler;
pub mod ml;

pub use error::{Error, Result};
