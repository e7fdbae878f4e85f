//! Average-rank tables over (method, dataset) grids and clique formation
//! from pairwise significance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::stats::{holm_adjust, wilcoxon_signed_rank};
use crate::evaluation::{Metric, RunRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RankDirection {
    /// Rank 1 goes to the smallest value (errors).
    LowerIsBetter,
    /// Rank 1 goes to the largest value (accuracies, agreement scores).
    HigherIsBetter,
}

/// Per-dataset mean metric values, per-dataset ranks (1 = best, ties
/// averaged) and average rank per method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTable {
    pub methods: Vec<String>,
    pub datasets: Vec<String>,
    /// `means[dataset][method]`
    pub means: Vec<Vec<f64>>,
    /// `ranks[dataset][method]`
    pub ranks: Vec<Vec<f64>>,
    pub average_ranks: Vec<f64>,
}

/// Ranks one dataset's method values, 1 = best, exact ties averaged.
fn rank_row(values: &[f64], direction: RankDirection) -> Vec<f64> {
    let m = values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| match direction {
        RankDirection::LowerIsBetter => values[a].partial_cmp(&values[b]).unwrap(),
        RankDirection::HigherIsBetter => values[b].partial_cmp(&values[a]).unwrap(),
    });
    let mut ranks = vec![0.0; m];
    let mut i = 0;
    while i < m {
        let mut j = i;
        while j + 1 < m && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let mean_rank = (i + 1 + j + 1) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = mean_rank;
        }
        i = j + 1;
    }
    ranks
}

impl RankTable {
    /// Builds the table from an explicit `means[dataset][method]` grid.
    pub fn from_means(
        methods: Vec<String>,
        datasets: Vec<String>,
        means: Vec<Vec<f64>>,
        direction: RankDirection,
    ) -> Result<Self> {
        if means.len() != datasets.len() || means.iter().any(|row| row.len() != methods.len()) {
            return Err(Error::InvalidParams(
                "means grid does not match methods x datasets".into(),
            ));
        }
        if methods.is_empty() || datasets.is_empty() {
            return Err(Error::InvalidParams("empty rank table".into()));
        }
        let ranks: Vec<Vec<f64>> = means.iter().map(|row| rank_row(row, direction)).collect();
        let average_ranks: Vec<f64> = (0..methods.len())
            .map(|m| ranks.iter().map(|row| row[m]).sum::<f64>() / datasets.len() as f64)
            .collect();
        Ok(Self {
            methods,
            datasets,
            means,
            ranks,
            average_ranks,
        })
    }

    /// Method indices sorted best-first by average rank.
    pub fn rank_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.methods.len()).collect();
        order.sort_by(|&a, &b| {
            self.average_ranks[a]
                .partial_cmp(&self.average_ranks[b])
                .unwrap()
        });
        order
    }
}

/// Builds the rank table from benchmark rows: each (method, dataset) cell
/// is the metric's mean over that pair's successful resamples.
///
/// Methods and datasets appear in first-appearance order of the records.
/// A pair with no successful run is an [`Error::IncompleteGrid`].
pub fn average_ranks(
    records: &[RunRecord],
    metric: Metric,
    direction: RankDirection,
) -> Result<RankTable> {
    let mut methods: Vec<String> = Vec::new();
    let mut datasets: Vec<String> = Vec::new();
    for r in records {
        if !methods.contains(&r.method) {
            methods.push(r.method.clone());
        }
        if !datasets.contains(&r.dataset) {
            datasets.push(r.dataset.clone());
        }
    }
    let mut means = vec![vec![f64::NAN; methods.len()]; datasets.len()];
    for (d, dataset) in datasets.iter().enumerate() {
        for (m, method) in methods.iter().enumerate() {
            let values: Vec<f64> = records
                .iter()
                .filter(|r| &r.method == method && &r.dataset == dataset)
                .filter_map(|r| metric.extract(r))
                .collect();
            if values.is_empty() {
                return Err(Error::IncompleteGrid {
                    method: method.clone(),
                    dataset: dataset.clone(),
                });
            }
            means[d][m] = values.iter().sum::<f64>() / values.len() as f64;
        }
    }
    RankTable::from_means(methods, datasets, means, direction)
}

/// Pairwise Wilcoxon signed-rank tests over per-dataset means, with the
/// Holm correction applied across all method pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseTests {
    pub methods: Vec<String>,
    /// Symmetric raw p matrix; diagonal is 1.
    pub raw_p: Vec<Vec<f64>>,
    /// Symmetric Holm-adjusted p matrix; diagonal is 1.
    pub adjusted_p: Vec<Vec<f64>>,
    /// Pairs whose test degenerated (all differences zero) or had too few
    /// usable pairs; their p is reported as 1.
    pub flagged: Vec<(String, String)>,
}

pub fn pairwise_wilcoxon_holm(table: &RankTable) -> Result<PairwiseTests> {
    let m = table.methods.len();
    let mut raw = vec![vec![1.0; m]; m];
    let mut flagged = Vec::new();
    let mut flat = Vec::new();
    let mut pairs = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            let a: Vec<f64> = table.means.iter().map(|row| row[i]).collect();
            let b: Vec<f64> = table.means.iter().map(|row| row[j]).collect();
            let p = match wilcoxon_signed_rank(&a, &b) {
                Ok(out) => {
                    if out.degenerate {
                        flagged.push((table.methods[i].clone(), table.methods[j].clone()));
                    }
                    out.p_value
                }
                Err(Error::TooFewPairs { .. }) => {
                    flagged.push((table.methods[i].clone(), table.methods[j].clone()));
                    1.0
                }
                Err(e) => return Err(e),
            };
            raw[i][j] = p;
            raw[j][i] = p;
            flat.push(p);
            pairs.push((i, j));
        }
    }
    let adjusted_flat = holm_adjust(&flat);
    let mut adjusted = vec![vec![1.0; m]; m];
    for (&(i, j), &p) in pairs.iter().zip(&adjusted_flat) {
        adjusted[i][j] = p;
        adjusted[j][i] = p;
    }
    Ok(PairwiseTests {
        methods: table.methods.clone(),
        raw_p: raw,
        adjusted_p: adjusted,
        flagged,
    })
}

/// Maximal rank-contiguous groups in which no pair is significant at
/// `alpha` (adjusted p below `alpha`). Returned as method indices into
/// `table.methods`, in rank order; groups contained in a larger group are
/// dropped.
pub fn form_cliques(
    table: &RankTable,
    adjusted_p: &[Vec<f64>],
    alpha: f64,
) -> Vec<Vec<usize>> {
    let order = table.rank_order();
    let m = order.len();
    let mut intervals: Vec<(usize, usize)> = Vec::new();
    for start in 0..m {
        let mut end = start;
        'grow: while end + 1 < m {
            let candidate = end + 1;
            for inside in start..=candidate {
                for other in inside + 1..=candidate {
                    if adjusted_p[order[inside]][order[other]] < alpha {
                        break 'grow;
                    }
                }
            }
            end = candidate;
        }
        intervals.push((start, end));
    }
    let maximal: Vec<(usize, usize)> = intervals
        .iter()
        .copied()
        .filter(|&(s, e)| {
            !intervals
                .iter()
                .any(|&(os, oe)| (os, oe) != (s, e) && os <= s && e <= oe)
        })
        .collect();
    let mut cliques: Vec<Vec<usize>> = maximal
        .into_iter()
        .map(|(s, e)| order[s..=e].to_vec())
        .collect();
    cliques.dedup();
    cliques
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(methods: &[&str], datasets: usize, means: Vec<Vec<f64>>) -> RankTable {
        RankTable::from_means(
            methods.iter().map(|s| s.to_string()).collect(),
            (0..datasets).map(|i| format!("d{i}")).collect(),
            means,
            RankDirection::LowerIsBetter,
        )
        .unwrap()
    }

    #[test]
    fn single_dataset_ranks_follow_order() {
        let t = table(&["a", "b", "c"], 1, vec![vec![0.3, 0.1, 0.2]]);
        assert_eq!(t.ranks[0], vec![3.0, 1.0, 2.0]);
        assert_eq!(t.average_ranks, vec![3.0, 1.0, 2.0]);
    }

    #[test]
    fn exact_ties_share_average_rank() {
        let t = table(&["a", "b"], 2, vec![vec![0.5, 0.5], vec![0.2, 0.2]]);
        assert_eq!(t.average_ranks, vec![1.5, 1.5]);
    }

    #[test]
    fn higher_is_better_flips_order() {
        let t = RankTable::from_means(
            vec!["a".into(), "b".into()],
            vec!["d0".into()],
            vec![vec![0.9, 0.7]],
            RankDirection::HigherIsBetter,
        )
        .unwrap();
        assert_eq!(t.ranks[0], vec![1.0, 2.0]);
    }

    #[test]
    fn ranks_invariant_under_monotone_transform() {
        let means = vec![vec![0.3, 0.1, 0.25], vec![0.4, 0.45, 0.2]];
        let t1 = table(&["a", "b", "c"], 2, means.clone());
        let transformed: Vec<Vec<f64>> = means
            .iter()
            .map(|row| row.iter().map(|v| (v * 3.0).exp()).collect())
            .collect();
        let t2 = table(&["a", "b", "c"], 2, transformed);
        assert_eq!(t1.ranks, t2.ranks);
        assert_eq!(t1.average_ranks, t2.average_ranks);
    }

    #[test]
    fn incomplete_grid_detected() {
        let records = vec![
            RunRecord::success("m1", "d1", 0, [0.5, 0.2, 0.3, 0.8], 0.0, 0.0),
            RunRecord::success("m2", "d1", 0, [0.5, 0.2, 0.3, 0.8], 0.0, 0.0),
            RunRecord::success("m1", "d2", 0, [0.5, 0.2, 0.3, 0.8], 0.0, 0.0),
        ];
        assert!(matches!(
            average_ranks(&records, Metric::Mae, RankDirection::LowerIsBetter),
            Err(Error::IncompleteGrid { .. })
        ));
    }

    #[test]
    fn mean_over_resamples_feeds_ranks() {
        let records = vec![
            RunRecord::success("m1", "d1", 0, [0.0, 0.1, 0.0, 0.0], 0.0, 0.0),
            RunRecord::success("m1", "d1", 1, [0.0, 0.3, 0.0, 0.0], 0.0, 0.0),
            RunRecord::success("m2", "d1", 0, [0.0, 0.5, 0.0, 0.0], 0.0, 0.0),
            RunRecord::success("m2", "d1", 1, [0.0, 0.1, 0.0, 0.0], 0.0, 0.0),
        ];
        let t = average_ranks(&records, Metric::Mae, RankDirection::LowerIsBetter).unwrap();
        assert!((t.means[0][0] - 0.2).abs() < 1e-12);
        assert!((t.means[0][1] - 0.3).abs() < 1e-12);
        assert_eq!(t.ranks[0], vec![1.0, 2.0]);
    }

    #[test]
    fn cliques_all_significant() {
        let t = table(&["a", "b", "c"], 1, vec![vec![0.1, 0.2, 0.3]]);
        let p = vec![
            vec![1.0, 0.01, 0.01],
            vec![0.01, 1.0, 0.01],
            vec![0.01, 0.01, 1.0],
        ];
        let cliques = form_cliques(&t, &p, 0.1);
        assert_eq!(cliques, vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn cliques_none_significant() {
        let t = table(&["a", "b", "c"], 1, vec![vec![0.1, 0.2, 0.3]]);
        let p = vec![vec![1.0; 3]; 3];
        let cliques = form_cliques(&t, &p, 0.1);
        assert_eq!(cliques, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn cliques_best_worst_pair_significant() {
        // methods in rank order a < b < c; only (a, c) significant.
        let t = table(&["a", "b", "c"], 1, vec![vec![0.1, 0.2, 0.3]]);
        let mut p = vec![vec![1.0; 3]; 3];
        p[0][2] = 0.01;
        p[2][0] = 0.01;
        let cliques = form_cliques(&t, &p, 0.1);
        assert_eq!(cliques, vec![vec![0, 1], vec![1, 2]]);
    }

    #[test]
    fn pairwise_tests_flag_degenerate_pairs() {
        let means: Vec<Vec<f64>> = (0..5)
            .map(|d| vec![0.1 * d as f64, 0.1 * d as f64])
            .collect();
        let t = table(&["a", "b"], 5, means);
        let tests = pairwise_wilcoxon_holm(&t).unwrap();
        assert_eq!(tests.adjusted_p[0][1], 1.0);
        assert_eq!(tests.flagged.len(), 1);
    }
}
