//! Matrix denoising with an unknown noise level.
//!
//! The noise level `σ` of an observation `X = M + σA` is estimated from the
//! median singular value of `X`, calibrated by the median `μ_γ` of the
//! Marčenko–Pastur law for the aspect ratio `γ = min(m, n) / max(m, n)`:
//!
//! ```text
//! σ̂ = med(λᵢ(X)) / √(n μ_γ)
//! ```
//!
//! The estimate `M̂` keeps every singular component with
//! `λᵢ(X) ≥ (2 + η) σ̂ √n` and discards the rest.
//!
//! ```
//! use usvt::{estimate_sigma, usvt_adaptive, DenseMatrix};
//!
//! let x = DenseMatrix::from_rows(&[vec![4.0, 0.1, 0.0], vec![0.0, 0.2, 0.1]]).unwrap();
//! let sigma_hat = estimate_sigma(&x).unwrap();
//! let (estimate, report) = usvt_adaptive(&x, 0.02).unwrap();
//! assert_eq!(report.sigma_used, sigma_hat);
//! assert_eq!(estimate.shape(), (2, 3));
//! ```

pub mod cli;
pub mod error;
pub mod estimators;
pub mod io;
pub mod matrix;
pub mod mp_law;
mod quadrature;
pub mod simulate;
pub mod spectral;

pub use error::{Error, Result};
pub use estimators::{
    estimate_sigma, mse, usvt_adaptive, usvt_denoise, DenoiseReport, DEFAULT_ETA,
};
pub use matrix::DenseMatrix;
pub use mp_law::{MpLaw, Probability};
pub use simulate::{
    aggregate, haar_orthogonal, noise_matrix, run_experiment, signal_matrix, ExperimentConfig,
    ExperimentRecord, NoiseKind, Schedule, SummaryRow,
};
pub use spectral::{
    empirical_spectral_cdf, frobenius_norm, ks_distance, median_singular_value, nuclear_norm,
    operator_norm, singular_values, svd, SpectralDecomposition,
};
