//! Kolmogorov distance between the squared singular values of a Gaussian
//! matrix and the Marčenko–Pastur law, for growing sizes at a fixed ratio.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use usvt::{ks_distance, noise_matrix, MpLaw, NoiseKind};

fn main() -> usvt::Result<()> {
    let gamma = 0.5;
    let law = MpLaw::new(gamma)?;
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    for m in [25, 50, 100, 200, 400, 800] {
        let n = (m as f64 / gamma) as usize;
        let x = noise_matrix(m, n, NoiseKind::Gaussian, &mut rng)?;
        println!("{m:>4} x {n:<5} KS = {:.5}", ks_distance(&x, &law)?);
    }
    Ok(())
}
