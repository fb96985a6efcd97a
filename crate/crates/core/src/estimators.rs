//! Noise-level estimation from the median singular value, and universal
//! singular value thresholding with either a known or an estimated noise level.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::mp_law::MpLaw;
use crate::spectral::{self, sample_median};

pub const DEFAULT_ETA: f64 = 0.02;

/// Audit trail of one thresholding run. Indices are one-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenoiseReport {
    pub m: usize,
    pub n: usize,
    pub eta: f64,
    pub sigma_used: f64,
    pub mu_gamma: f64,
    pub threshold: f64,
    pub kept_rank: usize,
    pub kept_indices: Vec<usize>,
    /// Set when the adaptive path estimated a noise level of exactly zero.
    pub degenerate_sigma: bool,
}

fn check_eta(eta: f64) -> Result<()> {
    if eta > 0.0 && eta <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("eta must lie in (0, 1], got {eta}")))
    }
}

/// `(2 + η) σ √n` with `n = max(m, n)`.
pub fn usvt_threshold(rows: usize, cols: usize, sigma: f64, eta: f64) -> f64 {
    (2.0 + eta) * sigma * (rows.max(cols) as f64).sqrt()
}

/// `med(λᵢ) / √(n μ_γ)` given the singular values of an `m x n` matrix.
pub fn sigma_from_singular_values(values: &[f64], rows: usize, cols: usize, law: &MpLaw) -> f64 {
    let n = rows.max(cols) as f64;
    sample_median(values) / (n * law.median()).sqrt()
}

/// Noise-level estimate `σ̂(X)`.
pub fn estimate_sigma(x: &DenseMatrix) -> Result<f64> {
    let law = MpLaw::for_shape(x.rows(), x.cols())?;
    estimate_sigma_with(x, &law)
}

/// As [`estimate_sigma`], reusing a law whose median is already cached.
pub fn estimate_sigma_with(x: &DenseMatrix, law: &MpLaw) -> Result<f64> {
    let values = spectral::singular_values(x)?;
    Ok(sigma_from_singular_values(&values, x.rows(), x.cols(), law))
}

/// Number of singular values at or above the threshold for `(sigma, eta)`.
pub fn kept_rank_for(values: &[f64], rows: usize, cols: usize, sigma: f64, eta: f64) -> usize {
    let t = usvt_threshold(rows, cols, sigma, eta);
    values.iter().filter(|&&v| v >= t).count()
}

/// Thresholding with a known noise level.
pub fn usvt_denoise(x: &DenseMatrix, sigma: f64, eta: f64) -> Result<(DenseMatrix, DenoiseReport)> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!("sigma must be finite and >= 0, got {sigma}")));
    }
    check_eta(eta)?;
    let law = MpLaw::for_shape(x.rows(), x.cols())?;
    threshold_matrix(x, None, sigma, eta, &law, false)
}

/// Thresholding at the level implied by `σ̂(X)`.
pub fn usvt_adaptive(x: &DenseMatrix, eta: f64) -> Result<(DenseMatrix, DenoiseReport)> {
    let law = MpLaw::for_shape(x.rows(), x.cols())?;
    usvt_adaptive_with(x, eta, &law)
}

pub fn usvt_adaptive_with(
    x: &DenseMatrix,
    eta: f64,
    law: &MpLaw,
) -> Result<(DenseMatrix, DenoiseReport)> {
    check_eta(eta)?;
    let values = spectral::singular_values(x)?;
    adaptive_from_values(x, values, eta, law)
}

/// Adaptive thresholding when the singular values of `x` are already known.
pub(crate) fn adaptive_from_values(
    x: &DenseMatrix,
    values: Vec<f64>,
    eta: f64,
    law: &MpLaw,
) -> Result<(DenseMatrix, DenoiseReport)> {
    check_eta(eta)?;
    let sigma_hat = sigma_from_singular_values(&values, x.rows(), x.cols(), law);
    threshold_matrix(x, Some(values), sigma_hat, eta, law, sigma_hat == 0.0)
}

fn threshold_matrix(
    x: &DenseMatrix,
    values: Option<Vec<f64>>,
    sigma: f64,
    eta: f64,
    law: &MpLaw,
    degenerate_sigma: bool,
) -> Result<(DenseMatrix, DenoiseReport)> {
    let (m, n) = x.shape();
    let k = m.min(n);
    let threshold = usvt_threshold(m, n, sigma, eta);
    let mut report = DenoiseReport {
        m,
        n,
        eta,
        sigma_used: sigma,
        mu_gamma: law.median(),
        threshold,
        kept_rank: 0,
        kept_indices: Vec::new(),
        degenerate_sigma,
    };

    // Every singular value is >= 0, so a zero threshold keeps the whole matrix.
    if threshold == 0.0 {
        report.kept_indices = (1..=k).collect();
        report.kept_rank = k;
        return Ok((x.clone(), report));
    }

    let values = match values {
        Some(v) => v,
        None => spectral::singular_values(x)?,
    };
    if values.iter().all(|&v| v < threshold) {
        return Ok((DenseMatrix::zeros(m, n), report));
    }

    let decomposition = spectral::svd(x)?;
    let kept: Vec<usize> = decomposition
        .singular_values()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= threshold)
        .map(|(i, _)| i)
        .collect();
    report.kept_indices = kept.iter().map(|i| i + 1).collect();
    report.kept_rank = kept.len();
    Ok((decomposition.reconstruct(&kept), report))
}

/// Mean squared entrywise difference `‖A − B‖_F² / (mn)`.
pub fn mse(a: &DenseMatrix, b: &DenseMatrix) -> Result<f64> {
    a.check_same_shape(b)?;
    let total: f64 = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok(total / (a.rows() * a.cols()) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mse_examples() {
        let a = DenseMatrix::from_rows(&[vec![0.0, 0.0]]).unwrap();
        let b = DenseMatrix::from_rows(&[vec![3.0, 4.0]]).unwrap();
        assert_eq!(mse(&a, &b).unwrap(), 12.5);
        assert_eq!(mse(&b, &a).unwrap(), 12.5);
        assert_eq!(mse(&a, &a).unwrap(), 0.0);
        assert!(matches!(
            mse(&a, &DenseMatrix::zeros(2, 1)),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn eta_is_validated() {
        let x = DenseMatrix::identity(3);
        for eta in [0.0, -0.5, 1.5, f64::NAN] {
            assert!(usvt_denoise(&x, 1.0, eta).is_err());
            assert!(usvt_adaptive(&x, eta).is_err());
        }
        assert!(usvt_denoise(&x, 1.0, 1.0).is_ok());
        assert!(usvt_denoise(&x, -1.0, 0.5).is_err());
    }

    #[test]
    fn zero_sigma_returns_input() {
        let x = DenseMatrix::from_fn(3, 4, |i, j| (i as f64 - 1.3) * (j as f64 + 0.7)).unwrap();
        let (est, report) = usvt_denoise(&x, 0.0, DEFAULT_ETA).unwrap();
        assert_eq!(est, x);
        assert_eq!(report.kept_rank, 3);
        assert_eq!(report.kept_indices, vec![1, 2, 3]);
        assert_eq!(report.threshold, 0.0);
        assert!(!report.degenerate_sigma);
    }

    #[test]
    fn zero_input_is_degenerate_and_stays_zero() {
        let x = DenseMatrix::zeros(4, 6);
        assert_eq!(estimate_sigma(&x).unwrap(), 0.0);
        let (est, report) = usvt_adaptive(&x, DEFAULT_ETA).unwrap();
        assert!(est.is_zero());
        assert!(report.degenerate_sigma);
        assert_eq!(report.sigma_used, 0.0);
    }

    #[test]
    fn tie_at_threshold_is_kept() {
        // λ = (3, 1); search neighbouring floats for σ giving a threshold of exactly 3.
        let x = DenseMatrix::diagonal(2, 2, &[3.0, 1.0]).unwrap();
        let eta = 1.0;
        let mut sigma = 3.0 / (3.0 * 2.0_f64.sqrt());
        sigma = f64::from_bits(sigma.to_bits() - 8);
        let sigma = (0..16)
            .map(|k| f64::from_bits(sigma.to_bits() + k))
            .find(|&s| usvt_threshold(2, 2, s, eta) == 3.0)
            .expect("an exact tie is representable");
        let (est, report) = usvt_denoise(&x, sigma, eta).unwrap();
        assert_eq!(report.kept_indices, vec![1]);
        assert!((est.get(0, 0) - 3.0).abs() < 1e-14);
    }
}
