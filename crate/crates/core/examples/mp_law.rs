//! Support, median and a few quantiles of the Marčenko–Pastur law.
//!
//!     cargo run --example mp_law -- 0.2

use usvt::{MpLaw, Probability};

fn main() -> usvt::Result<()> {
    let gammas: Vec<f64> = match std::env::args().nth(1) {
        Some(g) => vec![g.parse().expect("gamma must be a number")],
        None => vec![0.04, 0.2, 0.5, 1.0],
    };
    for gamma in gammas {
        let law = MpLaw::new(gamma)?;
        println!(
            "gamma {gamma}: support [{:.4}, {:.4}], median {:.10}",
            law.lower_edge(),
            law.upper_edge(),
            law.median()
        );
        for p in [0.1, 0.25, 0.75, 0.9] {
            let x = law.quantile(Probability::new(p)?);
            println!("  q({p}) = {x:.8}  density {:.6}", law.density(x));
        }
    }
    Ok(())
}
