//! Gaussian-process surrogate with a squared-exponential kernel, used to
//! predict the LOO MAE of untried configurations.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fitted surrogate over normalized configuration vectors.
///
/// The prior mean is the average observed MAE, so predictions far from all
/// observations revert to it. Only the posterior mean is needed for the
/// acquisition step, so the solved weight vector is stored instead of the
/// full factorization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpSurrogate {
    pub observed_configs: Vec<Vec<f64>>,
    pub observed_maes: Vec<f64>,
    pub length_scale: f64,
    pub noise_variance: f64,
    prior_mean: f64,
    weights: Vec<f64>,
}

fn kernel(a: &[f64], b: &[f64], length_scale: f64) -> f64 {
    let squared: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-squared / (2.0 * length_scale * length_scale)).exp()
}

/// Fits the surrogate on `(config, MAE)` pairs.
///
/// Solves `(K + noise I) w = y - mean` through a Cholesky factorization,
/// escalating a diagonal jitter up to `1e-6` before giving up.
pub fn gp_fit(
    configs: Vec<Vec<f64>>,
    maes: Vec<f64>,
    length_scale: f64,
    noise_variance: f64,
) -> Result<GpSurrogate> {
    if configs.is_empty() || configs.len() != maes.len() {
        return Err(Error::InvalidParams(
            "surrogate needs matching non-empty observations".into(),
        ));
    }
    if !(length_scale > 0.0) || noise_variance < 0.0 {
        return Err(Error::InvalidParams(
            "length_scale must be positive and noise_variance nonnegative".into(),
        ));
    }
    let n = configs.len();
    let prior_mean = maes.iter().sum::<f64>() / n as f64;
    let base = DMatrix::from_fn(n, n, |i, j| kernel(&configs[i], &configs[j], length_scale));
    let centered = DVector::from_iterator(n, maes.iter().map(|&m| m - prior_mean));

    for jitter in [0.0, 1e-12, 1e-10, 1e-8, 1e-6] {
        let mut m = base.clone();
        for i in 0..n {
            m[(i, i)] += noise_variance + jitter;
        }
        if let Some(chol) = m.cholesky() {
            let weights = chol.solve(&centered);
            return Ok(GpSurrogate {
                observed_configs: configs,
                observed_maes: maes,
                length_scale,
                noise_variance,
                prior_mean,
                weights: weights.iter().copied().collect(),
            });
        }
    }
    Err(Error::SingularKernel)
}

impl GpSurrogate {
    /// Posterior mean at a configuration vector.
    pub fn predict_mean(&self, config: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (observed, &weight) in self.observed_configs.iter().zip(&self.weights) {
            acc += kernel(config, observed, self.length_scale) * weight;
        }
        self.prior_mean + acc
    }
}

/// Convenience for callers holding a surrogate reference.
pub fn gp_predict_mean(surrogate: &GpSurrogate, config: &[f64]) -> f64 {
    surrogate.predict_mean(config)
}
