//! Adaptive thresholding of a strong low-rank signal, compared with the
//! known-noise estimator and with the raw observation.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use usvt::{mse, noise_matrix, signal_matrix, usvt_adaptive, usvt_denoise, NoiseKind, DEFAULT_ETA};

fn main() -> usvt::Result<()> {
    let (m, n, sigma) = (100, 300, 0.01);
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let signal = signal_matrix(5, m, n, &mut rng)?;
    let x = signal.add(&noise_matrix(m, n, NoiseKind::Gaussian, &mut rng)?.scale(sigma))?;

    let (adaptive, report) = usvt_adaptive(&x, DEFAULT_ETA)?;
    let (known, known_report) = usvt_denoise(&x, sigma, DEFAULT_ETA)?;

    println!("sigma {sigma}, estimated {:.6}", report.sigma_used);
    println!("threshold {:.4}, kept {:?}", report.threshold, report.kept_indices);
    println!("known-sigma kept rank {}", known_report.kept_rank);
    println!("mse observed  {:.3e}", mse(&x, &signal)?);
    println!("mse adaptive  {:.3e}", mse(&adaptive, &signal)?);
    println!("mse known     {:.3e}", mse(&known, &signal)?);
    Ok(())
}
