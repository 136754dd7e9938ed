//! Accuracy, confusion matrix, and Pearson-correlation feature ranking.

use crate::dataset::FeatureMatrix;
use crate::error::{Error, Result};
use crate::labeler::{EnvLabel, NUM_LABELS};

/// 6×6 count matrix: rows are actual label ranks, columns predicted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub counts: [[usize; NUM_LABELS]; NUM_LABELS],
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn row_sums(&self) -> [usize; NUM_LABELS] {
        let mut sums = [0; NUM_LABELS];
        for (i, row) in self.counts.iter().enumerate() {
            sums[i] = row.iter().sum();
        }
        sums
    }

    /// trace / total.
    pub fn accuracy(&self) -> f64 {
        let correct: usize = (0..NUM_LABELS).map(|i| self.counts[i][i]).sum();
        correct as f64 / self.total() as f64
    }
}

fn check_lengths(predicted: &[EnvLabel], actual: &[EnvLabel]) -> Result<()> {
    if predicted.len() != actual.len() {
        return Err(Error::domain(format!(
            "{} predictions for {} actual labels",
            predicted.len(),
            actual.len()
        )));
    }
    if predicted.is_empty() {
        return Err(Error::domain("cannot evaluate zero predictions".to_string()));
    }
    Ok(())
}

/// Fraction of matching positions.
pub fn accuracy(predicted: &[EnvLabel], actual: &[EnvLabel]) -> Result<f64> {
    check_lengths(predicted, actual)?;
    let matches = predicted
        .iter()
        .zip(actual)
        .filter(|(p, a)| p == a)
        .count();
    Ok(matches as f64 / actual.len() as f64)
}

/// Confusion counts: entry (i, j) is rows with actual rank i+1 predicted as j+1.
pub fn confusion(predicted: &[EnvLabel], actual: &[EnvLabel]) -> Result<ConfusionMatrix> {
    check_lengths(predicted, actual)?;
    let mut counts = [[0usize; NUM_LABELS]; NUM_LABELS];
    for (p, a) in predicted.iter().zip(actual) {
        counts[a.index()][p.index()] += 1;
    }
    Ok(ConfusionMatrix { counts })
}

/// Pearson correlation coefficient, two-pass.
///
/// Constant input has no defined correlation and reports
/// [`Error::UndefinedCorrelation`] rather than a silent zero.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::domain(format!(
            "correlation inputs have lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::domain(format!(
            "correlation needs at least 2 points, got {}",
            x.len()
        )));
    }
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mean_x;
        let dy = yi - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation(
            "input is constant".to_string(),
        ));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// One ranked feature; `r` is `None` when the correlation is not computable.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedFeature {
    pub name: String,
    pub r: Option<f64>,
}

/// Features ordered by |r| descending; undefined correlations last.
/// Ties break by feature name.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRanking {
    pub entries: Vec<RankedFeature>,
}

/// Ranks features by the absolute Pearson correlation between each
/// feature column and the numeric label rank (Good=1 … Severe=6).
pub fn rank_features(matrix: &FeatureMatrix) -> Result<FeatureRanking> {
    let labels = matrix
        .labels
        .as_ref()
        .ok_or_else(|| Error::domain("feature ranking requires a labeled matrix".to_string()))?;
    if matrix.n_rows() < 2 {
        return Err(Error::domain(format!(
            "feature ranking needs at least 2 rows, got {}",
            matrix.n_rows()
        )));
    }
    let y: Vec<f64> = labels.iter().map(|l| l.rank() as f64).collect();

    let mut computable = Vec::new();
    let mut undefined = Vec::new();
    for (j, name) in matrix.feature_names.iter().enumerate() {
        match pearson(&matrix.column(j), &y) {
            Ok(r) => computable.push(RankedFeature {
                name: name.clone(),
                r: Some(r),
            }),
            Err(Error::UndefinedCorrelation(_)) => undefined.push(RankedFeature {
                name: name.clone(),
                r: None,
            }),
            Err(other) => return Err(other),
        }
    }

    computable.sort_by(|a, b| {
        let ra = a.r.unwrap().abs();
        let rb = b.r.unwrap().abs();
        rb.partial_cmp(&ra).unwrap().then_with(|| a.name.cmp(&b.name))
    });
    undefined.sort_by(|a, b| a.name.cmp(&b.name));
    computable.extend(undefined);
    Ok(FeatureRanking { entries: computable })
}
