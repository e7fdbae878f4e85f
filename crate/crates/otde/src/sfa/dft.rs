//! Truncated discrete Fourier transform of sliding windows.

use crate::error::{Error, Result};

/// Shifts a window to mean 0 and scales it to unit standard deviation.
///
/// Windows whose standard deviation is at most `1e-8` come back as all
/// zeros. The standard deviation uses the population (1/n) form.
pub fn z_normalize(window: &[f64]) -> Vec<f64> {
    if window.is_empty() {
        return Vec::new();
    }
    let n = window.len() as f64;
    let mean = window.iter().sum::<f64>() / n;
    let var = window.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    if std > 1e-8 {
        window.iter().map(|v| (v - mean) / std).collect()
    } else {
        vec![0.0; window.len()]
    }
}

/// Precomputed DFT basis for one window length, reused across windows.
///
/// With `normalize` set, windows are z-normalized first and the retained
/// coefficients start at frequency 1: the mean coefficient of a centred
/// window is identically zero and carries nothing.
pub(crate) struct DftPlan {
    window_length: usize,
    coefficient_count: usize,
    normalize: bool,
    cos_table: Vec<f64>,
    sin_table: Vec<f64>,
}

impl DftPlan {
    pub fn new(window_length: usize, coefficient_count: usize, normalize: bool) -> Result<Self> {
        if coefficient_count == 0 {
            return Err(Error::InvalidParams(
                "need at least one Fourier coefficient".into(),
            ));
        }
        if 2 * coefficient_count > window_length {
            return Err(Error::TooManyCoefficients {
                requested: 2 * coefficient_count,
                window: window_length,
            });
        }
        let start = if normalize { 1 } else { 0 };
        let mut cos_table = Vec::with_capacity(coefficient_count * window_length);
        let mut sin_table = Vec::with_capacity(coefficient_count * window_length);
        for j in start..start + coefficient_count {
            for k in 0..window_length {
                let angle = 2.0 * std::f64::consts::PI * (j * k) as f64 / window_length as f64;
                cos_table.push(angle.cos());
                sin_table.push(angle.sin());
            }
        }
        Ok(Self {
            window_length,
            coefficient_count,
            normalize,
            cos_table,
            sin_table,
        })
    }

    pub fn output_len(&self) -> usize {
        2 * self.coefficient_count
    }

    /// Writes `(re, im)` pairs for the retained coefficients into `out`.
    pub fn run(&self, window: &[f64], out: &mut [f64]) {
        debug_assert_eq!(window.len(), self.window_length);
        debug_assert_eq!(out.len(), self.output_len());
        let normalized;
        let x: &[f64] = if self.normalize {
            normalized = z_normalize(window);
            &normalized
        } else {
            window
        };
        let w = self.window_length;
        for j in 0..self.coefficient_count {
            let cos = &self.cos_table[j * w..(j + 1) * w];
            let sin = &self.sin_table[j * w..(j + 1) * w];
            let mut re = 0.0;
            let mut im = 0.0;
            for k in 0..w {
                re += x[k] * cos[k];
                im -= x[k] * sin[k];
            }
            out[2 * j] = re;
            out[2 * j + 1] = im;
        }
    }
}

/// Retained DFT coefficients of one window as `(re, im)` pairs.
///
/// With `normalize = false` these are frequencies `0..c`; with
/// `normalize = true` the window is z-normalized and frequencies `1..=c`
/// are returned.
pub fn dft_coefficients(window: &[f64], coefficient_count: usize, normalize: bool) -> Result<Vec<f64>> {
    let plan = DftPlan::new(window.len(), coefficient_count, normalize)?;
    let mut out = vec![0.0; plan.output_len()];
    plan.run(window, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// Naive full-spectrum DFT used as the reference.
    fn naive_dft(x: &[f64]) -> Vec<(f64, f64)> {
        let w = x.len();
        (0..w)
            .map(|j| {
                let mut re = 0.0;
                let mut im = 0.0;
                for (k, &v) in x.iter().enumerate() {
                    let angle = -2.0 * std::f64::consts::PI * (j as f64) * (k as f64) / w as f64;
                    re += v * angle.cos();
                    im += v * angle.sin();
                }
                (re, im)
            })
            .collect()
    }

    #[test]
    fn z_normalize_cases() {
        assert_eq!(z_normalize(&[1.0, 1.0, 1.0]), vec![0.0, 0.0, 0.0]);
        assert_eq!(z_normalize(&[0.0, 2.0]), vec![-1.0, 1.0]);
        let mut rng = StdRng::seed_from_u64(1);
        let window: Vec<f64> = (0..32).map(|_| rng.random_range(-5.0..5.0)).collect();
        let z = z_normalize(&window);
        let mean: f64 = z.iter().sum::<f64>() / z.len() as f64;
        assert!(mean.abs() < 1e-12);
    }

    #[test]
    fn constant_window_keeps_only_the_sum() {
        let coeffs = dft_coefficients(&[5.0, 5.0, 5.0, 5.0], 1, false).unwrap();
        assert!((coeffs[0] - 20.0).abs() < 1e-12);
        assert!(coeffs[1].abs() < 1e-12);
    }

    #[test]
    fn cosine_concentrates_at_frequency_one() {
        let w = 8;
        let x: Vec<f64> = (0..w)
            .map(|k| (2.0 * std::f64::consts::PI * k as f64 / w as f64).cos())
            .collect();
        let coeffs = dft_coefficients(&x, 2, false).unwrap();
        assert!(coeffs[0].abs() < 1e-9, "F_0 re = {}", coeffs[0]);
        assert!(coeffs[1].abs() < 1e-9);
        assert!((coeffs[2] - 4.0).abs() < 1e-9, "F_1 re = {}", coeffs[2]);
        assert!(coeffs[3].abs() < 1e-9);
    }

    #[test]
    fn linearity_without_normalization() {
        let mut rng = StdRng::seed_from_u64(2);
        let x: Vec<f64> = (0..16).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..16).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (a, b) = (2.5, -0.75);
        let combined: Vec<f64> = x.iter().zip(&y).map(|(xv, yv)| a * xv + b * yv).collect();
        let fx = dft_coefficients(&x, 4, false).unwrap();
        let fy = dft_coefficients(&y, 4, false).unwrap();
        let fc = dft_coefficients(&combined, 4, false).unwrap();
        for i in 0..fc.len() {
            assert!((fc[i] - (a * fx[i] + b * fy[i])).abs() < 1e-9);
        }
    }

    #[test]
    fn matches_naive_oracle() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..50 {
            let w = rng.random_range(4..=64);
            let window: Vec<f64> = (0..w).map(|_| rng.random_range(-10.0..10.0)).collect();
            let c = rng.random_range(1..=w / 2);

            let got = dft_coefficients(&window, c, false).unwrap();
            let reference = naive_dft(&window);
            for j in 0..c {
                assert!((got[2 * j] - reference[j].0).abs() < 1e-9);
                assert!((got[2 * j + 1] - reference[j].1).abs() < 1e-9);
            }

            let got_norm = dft_coefficients(&window, c, true).unwrap();
            let reference_norm = naive_dft(&z_normalize(&window));
            for j in 0..c {
                assert!((got_norm[2 * j] - reference_norm[j + 1].0).abs() < 1e-9);
                assert!((got_norm[2 * j + 1] - reference_norm[j + 1].1).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn parseval_on_full_spectrum() {
        let mut rng = StdRng::seed_from_u64(4);
        for _ in 0..20 {
            let w = rng.random_range(2..=64);
            let window: Vec<f64> = (0..w).map(|_| rng.random_range(-3.0..3.0)).collect();
            let spectrum = naive_dft(&window);
            let lhs: f64 = spectrum.iter().map(|(re, im)| re * re + im * im).sum::<f64>() / w as f64;
            let rhs: f64 = window.iter().map(|v| v * v).sum();
            assert!((lhs - rhs).abs() < 1e-6, "w={w} lhs={lhs} rhs={rhs}");
        }
    }

    #[test]
    fn too_many_coefficients_rejected() {
        assert!(matches!(
            dft_coefficients(&[1.0, 2.0, 3.0], 2, false),
            Err(Error::TooManyCoefficients { .. })
        ));
    }
}
