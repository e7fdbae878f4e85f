//! A single dictionary classifier: fitted transform, stored training
//! histograms, and 1-NN prediction, plus the leave-one-out MAE estimate
//! the ensemble's surrogate learns from.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Series, TimeSeriesDataset};
use crate::error::{Error, Result};
use crate::metrics;
use crate::sfa::{fit_transform_train, transform_one, BinningModel, TransformParams, WordHistogram};

/// How two word histograms are compared in the 1-NN search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimilarityMeasure {
    /// Histogram intersection; larger is closer.
    #[default]
    Intersection,
    /// Symmetric squared count difference; smaller is closer.
    SquaredDifference,
}

/// Histogram intersection similarity: sum over words of the smaller count.
pub fn similarity(a: &WordHistogram, b: &WordHistogram) -> u64 {
    a.intersection(b)
}

/// Index of the nearest training histogram; ties keep the lowest index.
/// `skip` excludes one index (for leave-one-out evaluation).
fn nearest(
    query: &WordHistogram,
    histograms: &[WordHistogram],
    measure: SimilarityMeasure,
    skip: Option<usize>,
) -> usize {
    let mut best_idx = usize::MAX;
    match measure {
        SimilarityMeasure::Intersection => {
            let mut best = 0u64;
            for (i, h) in histograms.iter().enumerate() {
                if Some(i) == skip {
                    continue;
                }
                let score = query.intersection(h);
                if best_idx == usize::MAX || score > best {
                    best = score;
                    best_idx = i;
                }
            }
        }
        SimilarityMeasure::SquaredDifference => {
            let mut best = u64::MAX;
            for (i, h) in histograms.iter().enumerate() {
                if Some(i) == skip {
                    continue;
                }
                let score = query.squared_difference(h);
                if best_idx == usize::MAX || score < best {
                    best = score;
                    best_idx = i;
                }
            }
        }
    }
    best_idx
}

/// A fitted individual classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndividualOTDE {
    pub params: TransformParams,
    pub binning: BinningModel,
    pub train_histograms: Vec<WordHistogram>,
    pub train_labels: Vec<usize>,
    pub num_classes: usize,
    pub dimension_count: usize,
    pub series_length: usize,
    #[serde(default)]
    pub measure: SimilarityMeasure,
}

impl IndividualOTDE {
    pub fn fit(train: &TimeSeriesDataset, params: TransformParams) -> Result<Self> {
        Self::fit_with_measure(train, params, SimilarityMeasure::default())
    }

    pub fn fit_with_measure(
        train: &TimeSeriesDataset,
        params: TransformParams,
        measure: SimilarityMeasure,
    ) -> Result<Self> {
        let (binning, train_histograms) =
            fit_transform_train(&train.series, &train.labels, &params)?;
        Ok(Self {
            params,
            binning,
            train_histograms,
            train_labels: train.labels.clone(),
            num_classes: train.num_classes,
            dimension_count: train.dimension_count,
            series_length: train.series_length,
            measure,
        })
    }

    fn check_shape(&self, x: &Series) -> Result<()> {
        if x.len() != self.dimension_count
            || x.iter().any(|ch| ch.len() != self.series_length)
        {
            return Err(Error::ShapeMismatch {
                expected_dims: self.dimension_count,
                expected_len: self.series_length,
                got_dims: x.len(),
                got_len: x.first().map_or(0, |ch| ch.len()),
            });
        }
        Ok(())
    }

    /// 1-NN label of `x`: the label of the closest training histogram,
    /// ties broken by the lowest training index.
    pub fn predict_one(&self, x: &Series) -> Result<usize> {
        self.check_shape(x)?;
        let histogram = transform_one(x, &self.params, &self.binning)?;
        let idx = nearest(&histogram, &self.train_histograms, self.measure, None);
        Ok(self.train_labels[idx])
    }

    pub fn predict_dataset(&self, data: &TimeSeriesDataset) -> Result<Vec<usize>> {
        data.series.iter().map(|x| self.predict_one(x)).collect()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string(self)?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Seeded stratified subsample: for each class, a shuffled selection of
/// about `fraction` of its instances (at least one), returned as ascending
/// original indices.
fn stratified_subsample_indices(
    labels: &[usize],
    num_classes: usize,
    fraction: f64,
    seed: u64,
) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kept = Vec::new();
    for class in 0..num_classes {
        let mut members: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == class)
            .map(|(i, _)| i)
            .collect();
        if members.is_empty() {
            continue;
        }
        members.shuffle(&mut rng);
        let take = ((fraction * members.len() as f64).round() as usize)
            .clamp(1, members.len());
        kept.extend_from_slice(&members[..take]);
    }
    kept.sort_unstable();
    kept
}

/// Leave-one-out MAE of the 1-NN classifier under `params`, estimated on a
/// seeded stratified subsample of the training set.
///
/// The transform is fitted on the subsample; each retained instance is then
/// predicted by its nearest other histogram. With `subsample_fraction = 1`
/// this is the exact leave-one-out error.
pub fn loo_mae(
    train: &TimeSeriesDataset,
    params: &TransformParams,
    subsample_fraction: f64,
    seed: u64,
) -> Result<f64> {
    if train.len() < 2 {
        return Err(Error::NotEnoughData(train.len()));
    }
    if !(subsample_fraction > 0.0 && subsample_fraction <= 1.0) {
        return Err(Error::InvalidParams(
            "subsample_fraction must be in (0, 1]".into(),
        ));
    }
    let kept = stratified_subsample_indices(
        &train.labels,
        train.num_classes,
        subsample_fraction,
        seed,
    );
    if kept.len() < 2 {
        return Err(Error::NotEnoughData(kept.len()));
    }

    let series: Vec<Series> = kept.iter().map(|&i| train.series[i].clone()).collect();
    let labels: Vec<usize> = kept.iter().map(|&i| train.labels[i]).collect();
    let (_, histograms) = fit_transform_train(&series, &labels, params)?;

    let predictions: Vec<usize> = (0..kept.len())
        .map(|i| {
            let idx = nearest(
                &histograms[i],
                &histograms,
                SimilarityMeasure::Intersection,
                Some(i),
            );
            labels[idx]
        })
        .collect();
    metrics::mae(&labels, &predictions)
}
