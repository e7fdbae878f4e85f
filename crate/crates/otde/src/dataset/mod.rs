//! Dataset construction, discretisation and resampling.
//!
//! A [`TimeSeriesDataset`] holds N equal-length, d-channel real-valued
//! series with ordinal labels in `0..K-1`. Datasets are immutable after
//! construction and safe to share across parallel workers.

mod csv_format;
mod ts_format;

pub use csv_format::{read_csv_dataset, read_price_csv, write_csv_dataset};
pub use ts_format::{
    parse_ts_text, parse_tser_text, read_ts_file, read_tser_file, write_ts_file, write_ts_text,
};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One instance: `dimension_count` channels of `series_length` samples.
pub type Series = Vec<Vec<f64>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesDataset {
    pub name: String,
    pub series: Vec<Series>,
    pub labels: Vec<usize>,
    pub num_classes: usize,
    pub dimension_count: usize,
    pub series_length: usize,
}

impl TimeSeriesDataset {
    /// Validates the shape invariants and builds the dataset.
    pub fn new(
        name: impl Into<String>,
        series: Vec<Series>,
        labels: Vec<usize>,
        num_classes: usize,
    ) -> Result<Self> {
        if series.len() != labels.len() {
            return Err(Error::LengthMismatch {
                left: series.len(),
                right: labels.len(),
            });
        }
        if series.is_empty() {
            return Err(Error::MalformedDataset("dataset has no instances".into()));
        }
        if num_classes < 2 {
            return Err(Error::MalformedDataset(
                "a dataset needs at least 2 classes".into(),
            ));
        }
        let dimension_count = series[0].len();
        if dimension_count == 0 {
            return Err(Error::MalformedDataset("series has no dimensions".into()));
        }
        let series_length = series[0][0].len();
        if series_length == 0 {
            return Err(Error::MalformedDataset("series has zero length".into()));
        }
        for s in &series {
            if s.len() != dimension_count {
                return Err(Error::MalformedDataset(format!(
                    "expected {dimension_count} dimensions, found {}",
                    s.len()
                )));
            }
            for channel in s {
                if channel.len() != series_length {
                    return Err(Error::MalformedDataset(format!(
                        "expected series length {series_length}, found {}",
                        channel.len()
                    )));
                }
            }
        }
        for &label in &labels {
            if label >= num_classes {
                return Err(Error::LabelOutOfRange {
                    label,
                    num_classes,
                });
            }
        }
        Ok(Self {
            name: name.into(),
            series,
            labels,
            num_classes,
            dimension_count,
            series_length,
        })
    }

    /// Number of instances.
    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    /// Instance count per class, indexed by class.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.num_classes];
        for &label in &self.labels {
            counts[label] += 1;
        }
        counts
    }
}

/// Seeded re-split specification. Seed 0 reproduces the original split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResampleSpec {
    pub seed: u64,
    /// Train share of the pooled data, derived from the original split.
    pub train_fraction: f64,
}

impl ResampleSpec {
    pub fn new(seed: u64, train_fraction: f64) -> Self {
        Self {
            seed,
            train_fraction,
        }
    }

    /// Derives the train fraction from an existing split.
    pub fn for_split(train: &TimeSeriesDataset, test: &TimeSeriesDataset, seed: u64) -> Self {
        let total = (train.len() + test.len()) as f64;
        Self {
            seed,
            train_fraction: train.len() as f64 / total,
        }
    }
}

/// Pools train and test and re-splits them, preserving the original train
/// and test sizes exactly and the per-class train counts exactly.
///
/// Deterministic in `spec.seed`; seed 0 returns the inputs unchanged.
pub fn stratified_resample(
    train: &TimeSeriesDataset,
    test: &TimeSeriesDataset,
    spec: &ResampleSpec,
) -> Result<(TimeSeriesDataset, TimeSeriesDataset)> {
    if train.dimension_count != test.dimension_count || train.series_length != test.series_length {
        return Err(Error::ShapeMismatch {
            expected_dims: train.dimension_count,
            expected_len: train.series_length,
            got_dims: test.dimension_count,
            got_len: test.series_length,
        });
    }
    if train.num_classes != test.num_classes {
        return Err(Error::MalformedDataset(
            "train and test disagree on the number of classes".into(),
        ));
    }
    if spec.seed == 0 {
        return Ok((train.clone(), test.clone()));
    }

    let num_classes = train.num_classes;
    let train_counts = train.class_counts();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    // Pool in train-then-test order so the draw depends only on the seed.
    let pooled: Vec<(&Series, usize)> = train
        .series
        .iter()
        .zip(&train.labels)
        .chain(test.series.iter().zip(&test.labels))
        .map(|(s, &l)| (s, l))
        .collect();

    let mut new_train_series = Vec::with_capacity(train.len());
    let mut new_train_labels = Vec::with_capacity(train.len());
    let mut new_test_series = Vec::with_capacity(test.len());
    let mut new_test_labels = Vec::with_capacity(test.len());

    for class in 0..num_classes {
        let mut members: Vec<usize> = pooled
            .iter()
            .enumerate()
            .filter(|(_, (_, l))| *l == class)
            .map(|(i, _)| i)
            .collect();
        members.shuffle(&mut rng);
        let take = train_counts[class];
        for (rank, &idx) in members.iter().enumerate() {
            let (series, label) = pooled[idx];
            if rank < take {
                new_train_series.push(series.clone());
                new_train_labels.push(label);
            } else {
                new_test_series.push(series.clone());
                new_test_labels.push(label);
            }
        }
    }

    let new_train = TimeSeriesDataset::new(
        train.name.clone(),
        new_train_series,
        new_train_labels,
        num_classes,
    )?;
    let new_test = TimeSeriesDataset::new(
        test.name.clone(),
        new_test_series,
        new_test_labels,
        num_classes,
    )?;
    Ok((new_train, new_test))
}

/// Maps real values to `bins` equal-width bins over `[min, max]`.
///
/// Value `v` maps to `floor(bins * (v - min) / (max - min))` clamped to
/// `bins - 1`, so the maximum falls in the last bin.
pub fn discretize_equal_width(values: &[f64], bins: usize) -> Result<Vec<usize>> {
    if values.is_empty() || bins == 0 {
        return Err(Error::InvalidParams(
            "need non-empty values and at least one bin".into(),
        ));
    }
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(max > min) {
        return Err(Error::DegenerateRange);
    }
    let span = max - min;
    Ok(values
        .iter()
        .map(|&v| {
            let bin = (bins as f64 * (v - min) / span).floor() as usize;
            bin.min(bins - 1)
        })
        .collect())
}

/// Maps real values to labels using strictly ascending interior cut-points.
///
/// The label is the count of cut-points strictly below the value, yielding
/// `thresholds.len() + 1` classes.
pub fn discretize_thresholds(values: &[f64], thresholds: &[f64]) -> Result<Vec<usize>> {
    if thresholds.is_empty() {
        return Err(Error::InvalidThresholds);
    }
    if thresholds.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidThresholds);
    }
    Ok(values
        .iter()
        .map(|&v| thresholds.iter().filter(|&&t| t < v).count())
        .collect())
}

/// Builds fixed-lookback return windows from a chronological price list.
///
/// Returns are simple returns `r_t = p_t / p_{t-1} - 1`. Each instance for
/// `t > lookback` holds the previous `lookback` returns, and its raw target
/// is `r_t`; the caller discretises the targets into labels.
pub fn build_return_windows(
    prices: &[f64],
    lookback: usize,
) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    if lookback == 0 {
        return Err(Error::InvalidParams("lookback must be positive".into()));
    }
    if prices.len() < lookback + 2 {
        return Err(Error::InsufficientHistory {
            needed: lookback + 2,
            got: prices.len(),
        });
    }
    for (index, &price) in prices.iter().enumerate() {
        if !(price > 0.0) {
            return Err(Error::InvalidPrice { price, index });
        }
    }
    let returns: Vec<f64> = prices.windows(2).map(|w| w[1] / w[0] - 1.0).collect();
    let mut windows = Vec::new();
    let mut targets = Vec::new();
    for t in lookback..returns.len() {
        windows.push(returns[t - lookback..t].to_vec());
        targets.push(returns[t]);
    }
    Ok((windows, targets))
}

/// Default return thresholds for financial label construction.
pub const FINANCIAL_RETURN_THRESHOLDS: [f64; 4] = [-0.05, -0.02, 0.02, 0.05];

/// Assembles a univariate ordinal dataset from a price history: return
/// windows as instances, threshold-discretised next-period returns as labels.
pub fn make_financial_dataset(
    name: impl Into<String>,
    prices: &[f64],
    lookback: usize,
    thresholds: &[f64],
) -> Result<TimeSeriesDataset> {
    let (windows, targets) = build_return_windows(prices, lookback)?;
    let labels = discretize_thresholds(&targets, thresholds)?;
    let series = windows.into_iter().map(|w| vec![w]).collect();
    TimeSeriesDataset::new(name, series, labels, thresholds.len() + 1)
}
