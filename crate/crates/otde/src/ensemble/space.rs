//! Transform-parameter search space and its `[0,1]^p` encoding for the
//! surrogate.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sfa::TransformParams;

/// Dataset-independent description of the space; resolved against a
/// concrete series length with [`SpaceSpec::build`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    /// Smallest window length considered (clamped to the series length).
    pub window_min: usize,
    /// Cap on how many window lengths are sampled from the range.
    pub max_window_values: usize,
    pub coefficient_counts: Vec<usize>,
    pub alphabet_sizes: Vec<usize>,
    pub normalize_options: Vec<bool>,
    pub numerosity_options: Vec<bool>,
}

impl Default for SpaceSpec {
    fn default() -> Self {
        Self {
            window_min: 10,
            max_window_values: 30,
            coefficient_counts: (2..=8).collect(),
            alphabet_sizes: vec![4],
            normalize_options: vec![false, true],
            numerosity_options: vec![true],
        }
    }
}

impl SpaceSpec {
    /// Resolves the spec against a series length: window lengths are spread
    /// evenly over `[window_min, l]` (at most `max_window_values` of them),
    /// and coefficient counts that fit no window are dropped.
    pub fn build(&self, series_length: usize) -> Result<ParameterSpace> {
        let hi = series_length;
        let lo = self.window_min.min(hi).max(2);
        if hi < 2 {
            return Err(Error::InvalidParams(format!(
                "series length {series_length} is too short for any window"
            )));
        }
        let count = self.max_window_values.max(1).min(hi - lo + 1);
        let mut window_lengths: Vec<usize> = if count == 1 {
            vec![hi]
        } else {
            (0..count)
                .map(|i| {
                    let frac = i as f64 / (count - 1) as f64;
                    (lo as f64 + frac * (hi - lo) as f64).round() as usize
                })
                .collect()
        };
        window_lengths.dedup();

        let max_w = *window_lengths.last().unwrap();
        let coefficient_counts: Vec<usize> = self
            .coefficient_counts
            .iter()
            .copied()
            .filter(|&c| c >= 1 && 2 * c <= max_w)
            .collect();
        if coefficient_counts.is_empty() {
            return Err(Error::InvalidParams(
                "no coefficient count fits the window range".into(),
            ));
        }
        let space = ParameterSpace {
            window_lengths,
            coefficient_counts,
            alphabet_sizes: self.alphabet_sizes.clone(),
            normalize_options: self.normalize_options.clone(),
            numerosity_options: self.numerosity_options.clone(),
        };
        if space.alphabet_sizes.is_empty()
            || space.normalize_options.is_empty()
            || space.numerosity_options.is_empty()
        {
            return Err(Error::InvalidParams("empty parameter dimension".into()));
        }
        Ok(space)
    }
}

/// Concrete search space: the cartesian product of the listed values,
/// restricted to combinations with `2c <= w`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSpace {
    pub window_lengths: Vec<usize>,
    pub coefficient_counts: Vec<usize>,
    pub alphabet_sizes: Vec<usize>,
    pub normalize_options: Vec<bool>,
    pub numerosity_options: Vec<bool>,
}

impl ParameterSpace {
    /// Default space for a series length.
    pub fn default_for(series_length: usize) -> Result<Self> {
        SpaceSpec::default().build(series_length)
    }

    pub fn contains(&self, params: &TransformParams) -> bool {
        2 * params.coefficient_count <= params.window_length
            && self.window_lengths.contains(&params.window_length)
            && self.coefficient_counts.contains(&params.coefficient_count)
            && self.alphabet_sizes.contains(&params.alphabet_size)
            && self.normalize_options.contains(&params.normalize)
            && self.numerosity_options.contains(&params.numerosity_reduction)
    }

    /// Number of valid configurations.
    pub fn len(&self) -> usize {
        let per_window: usize = self
            .window_lengths
            .iter()
            .map(|&w| {
                self.coefficient_counts
                    .iter()
                    .filter(|&&c| 2 * c <= w)
                    .count()
            })
            .sum();
        per_window
            * self.alphabet_sizes.len()
            * self.normalize_options.len()
            * self.numerosity_options.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every valid configuration, in a fixed canonical order.
    pub fn enumerate(&self) -> Vec<TransformParams> {
        let mut all = Vec::with_capacity(self.len());
        for &w in &self.window_lengths {
            for &c in &self.coefficient_counts {
                if 2 * c > w {
                    continue;
                }
                for &t in &self.alphabet_sizes {
                    for &normalize in &self.normalize_options {
                        for &numerosity in &self.numerosity_options {
                            all.push(TransformParams {
                                window_length: w,
                                coefficient_count: c,
                                alphabet_size: t,
                                normalize,
                                numerosity_reduction: numerosity,
                            });
                        }
                    }
                }
            }
        }
        all
    }

    /// Uniform draw over the valid configurations.
    pub fn sample(&self, rng: &mut impl Rng) -> TransformParams {
        loop {
            let params = TransformParams {
                window_length: self.window_lengths[rng.random_range(0..self.window_lengths.len())],
                coefficient_count: self.coefficient_counts
                    [rng.random_range(0..self.coefficient_counts.len())],
                alphabet_size: self.alphabet_sizes[rng.random_range(0..self.alphabet_sizes.len())],
                normalize: self.normalize_options
                    [rng.random_range(0..self.normalize_options.len())],
                numerosity_reduction: self.numerosity_options
                    [rng.random_range(0..self.numerosity_options.len())],
            };
            if 2 * params.coefficient_count <= params.window_length {
                return params;
            }
        }
    }

    /// Min-max encoding of a configuration into `[0,1]^5`, dimension order
    /// `(w, c, T, normalize, numerosity)`. Zero-width dimensions encode 0.
    pub fn encode(&self, params: &TransformParams) -> Result<Vec<f64>> {
        if !self.contains(params) {
            return Err(Error::OutOfSpace);
        }
        fn scale(v: f64, values: &[f64]) -> f64 {
            let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if max > min {
                (v - min) / (max - min)
            } else {
                0.0
            }
        }
        let bools = |options: &[bool]| -> Vec<f64> {
            options.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
        };
        let windows: Vec<f64> = self.window_lengths.iter().map(|&v| v as f64).collect();
        let coeffs: Vec<f64> = self.coefficient_counts.iter().map(|&v| v as f64).collect();
        let alphabets: Vec<f64> = self.alphabet_sizes.iter().map(|&v| v as f64).collect();
        Ok(vec![
            scale(params.window_length as f64, &windows),
            scale(params.coefficient_count as f64, &coeffs),
            scale(params.alphabet_size as f64, &alphabets),
            scale(
                if params.normalize { 1.0 } else { 0.0 },
                &bools(&self.normalize_options),
            ),
            scale(
                if params.numerosity_reduction { 1.0 } else { 0.0 },
                &bools(&self.numerosity_options),
            ),
        ])
    }
}
