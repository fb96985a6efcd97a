//! The 200 x 1000 study over ranks {50, 100, 150, 200} and noise levels
//! {0.5, 1, 2, 4}, with a reduced replication count.
//!
//!     cargo run --release --example simulate_fig1 -- 10

use usvt::{aggregate, run_experiment, ExperimentConfig};

fn main() -> usvt::Result<()> {
    let mut config = ExperimentConfig::preset("paper-fig1")?;
    config.replications = std::env::args()
        .nth(1)
        .map_or(5, |r| r.parse().expect("replications must be an integer"));
    let records = run_experiment(&config)?;
    println!("{:>5} {:>6} {:>14} {:>14} {:>5}", "rank", "sigma", "mse(sigma)", "mse(matrix)", "reps");
    for row in aggregate(&records)? {
        println!(
            "{:>5} {:>6} {:>14.4e} {:>14.4e} {:>5}",
            row.rank, row.sigma, row.mean_sq_err_sigma, row.mean_mse_matrix, row.count
        );
    }
    Ok(())
}
