//! Paired nonparametric testing: Wilcoxon signed-rank with an exact small-n
//! distribution, and the Holm step-down correction.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Largest number of non-zero differences handled by exact enumeration in
/// [`WilcoxonMode::Auto`]; beyond it the normal approximation with tie and
/// continuity corrections is used.
pub const WILCOXON_EXACT_LIMIT: usize = 12;

/// Hard cap for forced exact mode; enumeration is exponential.
const EXACT_HARD_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WilcoxonMode {
    /// Exact for `n <= 12`, approximate otherwise.
    Auto,
    Exact,
    Approximate,
}

/// Outcome of a two-sided Wilcoxon signed-rank test.
#[derive(Debug, Clone, PartialEq)]
pub struct WilcoxonOutcome {
    /// Sum of ranks of the positive differences (W+).
    pub statistic: f64,
    pub p_value: f64,
    /// Whether the exact distribution was enumerated.
    pub exact: bool,
    /// All paired differences were zero; `p_value` is reported as 1.
    pub degenerate: bool,
    /// Non-zero differences used.
    pub n: usize,
}

/// Average ranks of `|d|`, ties sharing their mean rank. Returns the ranks
/// and the tie-group sizes.
fn ranked_abs(differences: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let n = differences.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        differences[a]
            .abs()
            .partial_cmp(&differences[b].abs())
            .unwrap()
    });
    let mut ranks = vec![0.0; n];
    let mut tie_sizes = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && differences[order[j + 1]].abs() == differences[order[i]].abs() {
            j += 1;
        }
        // positions i..=j (0-based) share the mean of ranks i+1..=j+1
        let mean_rank = (i + 1 + j + 1) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = mean_rank;
        }
        tie_sizes.push(j - i + 1);
        i = j + 1;
    }
    (ranks, tie_sizes)
}

/// Exact two-sided p-value by dynamic programming over all `2^n` sign
/// assignments of the observed ranks.
fn exact_p(ranks: &[f64], w_plus: f64) -> f64 {
    // Ranks are multiples of 0.5; scale by 2 to work in integers.
    let scaled: Vec<usize> = ranks.iter().map(|&r| (2.0 * r).round() as usize).collect();
    let total: usize = scaled.iter().sum();
    let mut counts = vec![0u64; total + 1];
    counts[0] = 1;
    for &r in &scaled {
        for w in (r..=total).rev() {
            counts[w] += counts[w - r];
        }
    }
    let observed = (2.0 * w_plus).round() as usize;
    let assignments = (1u64) << ranks.len();
    let le: u64 = counts[..=observed].iter().sum();
    let ge: u64 = counts[observed..].iter().sum();
    let tail = le.min(ge) as f64 / assignments as f64;
    (2.0 * tail).min(1.0)
}

/// Normal approximation with tie correction and continuity correction.
fn approximate_p(ranks: &[f64], tie_sizes: &[usize], w_plus: f64) -> f64 {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let tie_term: f64 = tie_sizes
        .iter()
        .map(|&t| {
            let t = t as f64;
            (t * t * t - t) / 48.0
        })
        .sum();
    let variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term;
    if variance <= 0.0 {
        return 1.0;
    }
    let centered = w_plus - mean;
    if centered == 0.0 {
        return 1.0;
    }
    let z = (centered.abs() - 0.5) / variance.sqrt();
    let normal = Normal::new(0.0, 1.0).unwrap();
    (2.0 * (1.0 - normal.cdf(z))).min(1.0)
}

/// Two-sided Wilcoxon signed-rank test on paired samples.
///
/// Zero differences are dropped; tied absolute differences share averaged
/// ranks. Needs at least 3 non-zero differences. When every difference is
/// zero the outcome is flagged degenerate with `p = 1`.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<WilcoxonOutcome> {
    wilcoxon_signed_rank_with(a, b, WilcoxonMode::Auto)
}

pub fn wilcoxon_signed_rank_with(
    a: &[f64],
    b: &[f64],
    mode: WilcoxonMode,
) -> Result<WilcoxonOutcome> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let differences: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    if differences.is_empty() {
        return Ok(WilcoxonOutcome {
            statistic: 0.0,
            p_value: 1.0,
            exact: true,
            degenerate: true,
            n: 0,
        });
    }
    let n = differences.len();
    if n < 3 {
        return Err(Error::TooFewPairs { min: 3, got: n });
    }

    let (ranks, tie_sizes) = ranked_abs(&differences);
    let w_plus: f64 = differences
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, &r)| r)
        .sum();

    let use_exact = match mode {
        WilcoxonMode::Auto => n <= WILCOXON_EXACT_LIMIT,
        WilcoxonMode::Exact => {
            if n > EXACT_HARD_LIMIT {
                return Err(Error::InvalidParams(format!(
                    "exact enumeration capped at n = {EXACT_HARD_LIMIT}, got {n}"
                )));
            }
            true
        }
        WilcoxonMode::Approximate => false,
    };
    let p_value = if use_exact {
        exact_p(&ranks, w_plus)
    } else {
        approximate_p(&ranks, &tie_sizes, w_plus)
    };
    Ok(WilcoxonOutcome {
        statistic: w_plus,
        p_value,
        exact: use_exact,
        degenerate: false,
        n,
    })
}

/// Holm step-down adjustment.
///
/// Sorted ascending, `p_(i)` is multiplied by `m - i + 1`, made monotone
/// non-decreasing, capped at 1, and mapped back to the input order.
pub fn holm_adjust(p_values: &[f64]) -> Vec<f64> {
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p_values[a].partial_cmp(&p_values[b]).unwrap());
    let mut adjusted = vec![0.0; m];
    let mut running = 0.0f64;
    for (i, &idx) in order.iter().enumerate() {
        let scaled = ((m - i) as f64 * p_values[idx]).min(1.0);
        running = running.max(scaled);
        adjusted[idx] = running;
    }
    adjusted
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent enumeration over explicit sign masks.
    fn bitmask_oracle(ranks: &[f64], w_plus: f64) -> f64 {
        let n = ranks.len();
        let mut le = 0u64;
        let mut ge = 0u64;
        for mask in 0u64..(1 << n) {
            let w: f64 = (0..n)
                .filter(|&i| mask & (1 << i) != 0)
                .map(|i| ranks[i])
                .sum();
            if w <= w_plus {
                le += 1;
            }
            if w >= w_plus {
                ge += 1;
            }
        }
        let tail = le.min(ge) as f64 / (1u64 << n) as f64;
        (2.0 * tail).min(1.0)
    }

    #[test]
    fn identical_samples_are_degenerate() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let out = wilcoxon_signed_rank(&a, &a).unwrap();
        assert!(out.degenerate);
        assert_eq!(out.p_value, 1.0);
    }

    #[test]
    fn five_positive_differences() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [0.0; 5];
        let out = wilcoxon_signed_rank(&a, &b).unwrap();
        assert!(out.exact);
        assert_eq!(out.statistic, 15.0);
        assert!((out.p_value - 0.0625).abs() < 1e-12);
    }

    #[test]
    fn too_few_pairs_rejected() {
        let a = [1.0, 2.0, 3.0];
        let b = [1.0, 2.0, 4.0];
        assert!(matches!(
            wilcoxon_signed_rank(&a, &b),
            Err(Error::TooFewPairs { min: 3, got: 1 })
        ));
    }

    #[test]
    fn tied_absolute_differences_use_average_ranks() {
        let d = [1.0, -1.0, 2.0, 3.0];
        let (ranks, ties) = ranked_abs(&d);
        assert_eq!(ranks, vec![1.5, 1.5, 3.0, 4.0]);
        assert_eq!(ties, vec![2, 1, 1]);
    }

    #[test]
    fn approximate_close_to_exact_mid_sizes() {
        let a = [
            0.9, 1.2, 0.3, -0.4, 1.7, 0.6, -0.2, 1.1, 0.8, 1.4, -0.9, 0.5, 1.6, 0.7,
        ];
        let b = [0.0; 14];
        let exact = wilcoxon_signed_rank_with(&a, &b, WilcoxonMode::Exact).unwrap();
        let approx = wilcoxon_signed_rank_with(&a, &b, WilcoxonMode::Approximate).unwrap();
        assert!(exact.exact && !approx.exact);
        assert!((exact.p_value - approx.p_value).abs() < 0.02);
    }

    #[test]
    fn holm_examples() {
        let adjusted = holm_adjust(&[0.01, 0.04, 0.03]);
        assert!((adjusted[0] - 0.03).abs() < 1e-12);
        assert!((adjusted[1] - 0.06).abs() < 1e-12);
        assert!((adjusted[2] - 0.06).abs() < 1e-12);

        assert_eq!(holm_adjust(&[0.2]), vec![0.2]);
        assert_eq!(holm_adjust(&[1.0, 1.0, 1.0]), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn holm_dominates_raw_p() {
        let raw = [0.001, 0.2, 0.05, 0.9, 0.04];
        let adjusted = holm_adjust(&raw);
        for (r, a) in raw.iter().zip(&adjusted) {
            assert!(a >= r);
            assert!(*a <= 1.0);
        }
    }

    proptest! {
        #[test]
        fn exact_mode_matches_bitmask_enumeration(
            diffs in prop::collection::vec(
                prop_oneof![
                    (1i8..=4).prop_map(|v| v as f64),
                    (-4i8..=-1).prop_map(|v| v as f64),
                    (-20i8..=20).prop_filter("nonzero", |v| *v != 0).prop_map(|v| v as f64 / 7.0),
                ],
                3..=12
            )
        ) {
            let zeros = vec![0.0; diffs.len()];
            let out = wilcoxon_signed_rank_with(&diffs, &zeros, WilcoxonMode::Exact).unwrap();
            let (ranks, _) = ranked_abs(&diffs);
            let w_plus: f64 = diffs
                .iter()
                .zip(&ranks)
                .filter(|(d, _)| **d > 0.0)
                .map(|(_, &r)| r)
                .sum();
            let oracle = bitmask_oracle(&ranks, w_plus);
            prop_assert!((out.p_value - oracle).abs() < 1e-12);
        }

        #[test]
        fn holm_is_monotone_in_sorted_order(
            raw in prop::collection::vec(0.0f64..=1.0, 1..12)
        ) {
            let adjusted = holm_adjust(&raw);
            let mut order: Vec<usize> = (0..raw.len()).collect();
            order.sort_by(|&a, &b| raw[a].partial_cmp(&raw[b]).unwrap());
            for pair in order.windows(2) {
                prop_assert!(adjusted[pair[0]] <= adjusted[pair[1]] + 1e-15);
            }
        }
    }
}
