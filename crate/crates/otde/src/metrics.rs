//! Ordinal and nominal performance measures.
//!
//! All metrics are offered through two routes: direct functions over label
//! vectors ([`ccr`], [`mae`], [`qwk`], [`one_off`]) and methods on a
//! [`ConfusionMatrix`]. The two routes are independent implementations and
//! are cross-checked in the tests.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_pair(y_true: &[usize], y_pred: &[usize]) -> Result<()> {
    if y_true.len() != y_pred.len() {
        return Err(Error::LengthMismatch {
            left: y_true.len(),
            right: y_pred.len(),
        });
    }
    if y_true.is_empty() {
        return Err(Error::InvalidParams("metric input is empty".into()));
    }
    Ok(())
}

fn check_range(labels: &[usize], num_classes: usize) -> Result<()> {
    for &label in labels {
        if label >= num_classes {
            return Err(Error::LabelOutOfRange { label, num_classes });
        }
    }
    Ok(())
}

/// Correct classification rate: the fraction of exact matches.
pub fn ccr(y_true: &[usize], y_pred: &[usize]) -> Result<f64> {
    check_pair(y_true, y_pred)?;
    let hits = y_true
        .iter()
        .zip(y_pred)
        .filter(|(t, p)| t == p)
        .count();
    Ok(hits as f64 / y_true.len() as f64)
}

/// Mean absolute error on the ordinal label scale.
pub fn mae(y_true: &[usize], y_pred: &[usize]) -> Result<f64> {
    check_pair(y_true, y_pred)?;
    let total: f64 = y_true
        .iter()
        .zip(y_pred)
        .map(|(&t, &p)| (t as f64 - p as f64).abs())
        .sum();
    Ok(total / y_true.len() as f64)
}

/// Quadratic weighted kappa.
///
/// Uses quadratic disagreement weights `(i - j)^2` between true class `i`
/// and predicted class `j`; any positive rescaling of the weights cancels
/// in the ratio. When the expected disagreement is zero (all mass on a
/// single cell) the statistic is undefined; this returns 1 on perfect
/// agreement and 0 otherwise.
pub fn qwk(y_true: &[usize], y_pred: &[usize], num_classes: usize) -> Result<f64> {
    check_pair(y_true, y_pred)?;
    check_range(y_true, num_classes)?;
    check_range(y_pred, num_classes)?;

    let n = y_true.len() as f64;
    let mut true_counts = vec![0usize; num_classes];
    let mut pred_counts = vec![0usize; num_classes];
    let mut observed = 0.0;
    for (&t, &p) in y_true.iter().zip(y_pred) {
        true_counts[t] += 1;
        pred_counts[p] += 1;
        let d = t as f64 - p as f64;
        observed += d * d;
    }
    let mut expected = 0.0;
    for (i, &ti) in true_counts.iter().enumerate() {
        if ti == 0 {
            continue;
        }
        for (j, &pj) in pred_counts.iter().enumerate() {
            if pj == 0 {
                continue;
            }
            let d = i as f64 - j as f64;
            expected += d * d * (ti as f64 * pj as f64 / n);
        }
    }
    if expected == 0.0 {
        return Ok(if observed == 0.0 { 1.0 } else { 0.0 });
    }
    Ok(1.0 - observed / expected)
}

/// Fraction of predictions at most one class away from the truth.
pub fn one_off(y_true: &[usize], y_pred: &[usize]) -> Result<f64> {
    check_pair(y_true, y_pred)?;
    let hits = y_true
        .iter()
        .zip(y_pred)
        .filter(|(&t, &p)| t.abs_diff(p) <= 1)
        .count();
    Ok(hits as f64 / y_true.len() as f64)
}

/// Confusion matrix with `counts[i][j]` = instances of true class `i`
/// predicted as class `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<usize>>,
    num_classes: usize,
}

/// Builds the confusion matrix for a pair of label vectors.
pub fn confusion(y_true: &[usize], y_pred: &[usize], num_classes: usize) -> Result<ConfusionMatrix> {
    ConfusionMatrix::from_labels(y_true, y_pred, num_classes)
}

impl ConfusionMatrix {
    pub fn from_labels(y_true: &[usize], y_pred: &[usize], num_classes: usize) -> Result<Self> {
        check_pair(y_true, y_pred)?;
        check_range(y_true, num_classes)?;
        check_range(y_pred, num_classes)?;
        let mut counts = vec![vec![0usize; num_classes]; num_classes];
        for (&t, &p) in y_true.iter().zip(y_pred) {
            counts[t][p] += 1;
        }
        Ok(Self {
            counts,
            num_classes,
        })
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn count(&self, true_class: usize, pred_class: usize) -> usize {
        self.counts[true_class][pred_class]
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    fn row_sum(&self, i: usize) -> usize {
        self.counts[i].iter().sum()
    }

    fn col_sum(&self, j: usize) -> usize {
        self.counts.iter().map(|row| row[j]).sum()
    }

    /// CCR computed from the matrix diagonal.
    pub fn ccr(&self) -> f64 {
        let diag: usize = (0..self.num_classes).map(|i| self.counts[i][i]).sum();
        diag as f64 / self.total() as f64
    }

    /// MAE computed from the matrix cells.
    pub fn mae(&self) -> f64 {
        let mut total = 0.0;
        for (i, row) in self.counts.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                total += (i as f64 - j as f64).abs() * c as f64;
            }
        }
        total / self.total() as f64
    }

    /// QWK computed from the matrix cells and its marginals.
    pub fn qwk(&self) -> f64 {
        let n = self.total() as f64;
        let mut observed = 0.0;
        let mut expected = 0.0;
        for i in 0..self.num_classes {
            for j in 0..self.num_classes {
                let d = i as f64 - j as f64;
                let w = d * d;
                observed += w * self.counts[i][j] as f64;
                expected += w * (self.row_sum(i) as f64 * self.col_sum(j) as f64 / n);
            }
        }
        if expected == 0.0 {
            return if observed == 0.0 { 1.0 } else { 0.0 };
        }
        1.0 - observed / expected
    }

    /// 1-OFF accuracy computed from the matrix cells.
    pub fn one_off(&self) -> f64 {
        let mut hits = 0usize;
        for (i, row) in self.counts.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if i.abs_diff(j) <= 1 {
                    hits += c;
                }
            }
        }
        hits as f64 / self.total() as f64
    }
}
