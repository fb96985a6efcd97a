//! Writing a matrix file and running the command-line front end on it
//! in-process.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use usvt::io::write_matrix;
use usvt::{noise_matrix, NoiseKind};

fn main() -> usvt::Result<()> {
    let dir = std::env::temp_dir().join("usvt-example");
    std::fs::create_dir_all(&dir)?;
    let input = dir.join("noise.csv");
    let x = noise_matrix(40, 120, NoiseKind::Gaussian, &mut ChaCha20Rng::seed_from_u64(0))?.scale(1.5);
    write_matrix(&input, &x)?;

    let input = input.to_string_lossy().into_owned();
    let output = dir.join("estimate.csv").to_string_lossy().into_owned();
    let report = dir.join("report.json").to_string_lossy().into_owned();
    let mut stdout = std::io::stdout();
    let mut stderr = std::io::stderr();
    for args in [
        vec!["estimate-sigma", "--input", &input],
        vec!["denoise", "--input", &input, "--output", &output, "--report", &report],
    ] {
        let code = usvt::cli::run(std::iter::once("usvt").chain(args), &mut stdout, &mut stderr);
        assert_eq!(code, usvt::cli::EXIT_OK);
    }
    println!("{}", std::fs::read_to_string(&report)?);
    Ok(())
}
