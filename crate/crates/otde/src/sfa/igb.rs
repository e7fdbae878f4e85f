//! Information Gain Binning: supervised cut-points per coefficient column,
//! found by a best-first single-feature regression tree.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-column cut-points turning real coefficient values into symbols.
///
/// Row `m` holds the ascending interior cut-points for coefficient column
/// `m`; the outer `-inf`/`+inf` bounds are implicit. A row may hold fewer
/// than `T - 1` cut-points when the fitted tree found fewer useful splits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinningModel {
    pub thresholds: Vec<Vec<f64>>,
}

impl BinningModel {
    /// Fits one row of cut-points per column.
    pub fn fit_columns(columns: &[Vec<f64>], labels: &[f64], alphabet_size: usize) -> Result<Self> {
        let thresholds = columns
            .iter()
            .map(|column| fit_igb(column, labels, alphabet_size))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { thresholds })
    }

    pub fn column_count(&self) -> usize {
        self.thresholds.len()
    }

    /// Symbol for value `v` in column `row`: the count of cut-points at or
    /// below `v` (half-open intervals, boundary values go right). A row
    /// with no cut-points always yields symbol 0.
    pub fn symbol_for(&self, row: usize, v: f64) -> usize {
        self.thresholds[row].partition_point(|&cut| cut <= v)
    }
}

struct Split {
    improvement: f64,
    threshold: f64,
    /// Split position in the sorted order: left child is `lo..=pos`.
    pos: usize,
}

/// Best split of the sorted range `lo..hi` by the Friedman improvement
/// `(w_l * w_r) / (w_l + w_r) * (mean_l - mean_r)^2` over midpoints of
/// consecutive distinct values. Equal improvements keep the smaller
/// threshold.
fn best_split(sorted_values: &[f64], label_prefix: &[f64], lo: usize, hi: usize) -> Option<Split> {
    let mut best: Option<Split> = None;
    for i in lo..hi - 1 {
        if !(sorted_values[i] < sorted_values[i + 1]) {
            continue;
        }
        let w_l = (i + 1 - lo) as f64;
        let w_r = (hi - i - 1) as f64;
        let mean_l = (label_prefix[i + 1] - label_prefix[lo]) / w_l;
        let mean_r = (label_prefix[hi] - label_prefix[i + 1]) / w_r;
        let diff = mean_l - mean_r;
        let improvement = (w_l * w_r) / (w_l + w_r) * (diff * diff);
        let threshold = (sorted_values[i] + sorted_values[i + 1]) / 2.0;
        if best.as_ref().is_none_or(|b| improvement > b.improvement) {
            best = Some(Split {
                improvement,
                threshold,
                pos: i,
            });
        }
    }
    best
}

/// Fits the Information Gain Binning cut-points for one coefficient column.
///
/// Grows a best-first regression tree on the single feature: at each step
/// the leaf/threshold pair with the highest improvement is split, ties
/// preferring the smaller threshold and then the earlier-created leaf.
/// Stops at `alphabet_size` leaves or when no split improves, and returns
/// the sorted split thresholds.
pub fn fit_igb(values: &[f64], labels: &[f64], alphabet_size: usize) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::EmptyColumn);
    }
    if values.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: values.len(),
            right: labels.len(),
        });
    }

    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let sorted_values: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let mut label_prefix = vec![0.0; values.len() + 1];
    for (slot, &i) in order.iter().enumerate() {
        label_prefix[slot + 1] = label_prefix[slot] + labels[i];
    }

    // Leaves in creation order; children replace their parent at the tail.
    let mut leaves: Vec<(usize, usize, Option<Split>)> = Vec::new();
    let first = best_split(&sorted_values, &label_prefix, 0, values.len());
    leaves.push((0, values.len(), first));

    let mut cut_points = Vec::new();
    while leaves.len() < alphabet_size {
        let mut chosen: Option<usize> = None;
        for (idx, (_, _, split)) in leaves.iter().enumerate() {
            let Some(split) = split else { continue };
            if split.improvement <= 0.0 {
                continue;
            }
            let better = match chosen {
                None => true,
                Some(prev) => {
                    let best = leaves[prev].2.as_ref().unwrap();
                    split.improvement > best.improvement
                        || (split.improvement == best.improvement
                            && split.threshold < best.threshold)
                }
            };
            if better {
                chosen = Some(idx);
            }
        }
        let Some(idx) = chosen else { break };
        let (lo, hi, split) = leaves.remove(idx);
        let split = split.unwrap();
        cut_points.push(split.threshold);
        let mid = split.pos + 1;
        let left = best_split(&sorted_values, &label_prefix, lo, mid);
        let right = best_split(&sorted_values, &label_prefix, mid, hi);
        leaves.push((lo, mid, left));
        leaves.push((mid, hi, right));
    }

    cut_points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(cut_points)
}
