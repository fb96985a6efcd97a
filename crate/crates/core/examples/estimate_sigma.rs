//! Noise-level estimates for pure noise and for a low-rank signal plus
//! noise, across the three noise distributions.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use usvt::{estimate_sigma, noise_matrix, signal_matrix, NoiseKind};

fn main() -> usvt::Result<()> {
    let (m, n) = (200, 1000);
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let signal = signal_matrix(50, m, n, &mut rng)?;
    for kind in [NoiseKind::Gaussian, NoiseKind::Rademacher, NoiseKind::Uniform] {
        for sigma in [0.5, 1.0, 2.0] {
            let noise = noise_matrix(m, n, kind, &mut rng)?.scale(sigma);
            let pure = estimate_sigma(&noise)?;
            let mixed = estimate_sigma(&signal.add(&noise)?)?;
            println!("{kind:<10} sigma {sigma:<4} noise only {pure:.4}  with rank-50 signal {mixed:.4}");
        }
    }
    Ok(())
}
