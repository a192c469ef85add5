//! Drives a simplex chain on the complete graph and the matrix chain with the
//! same pair and uniform, and tracks how far the matrix column stays above.

use gibbs_coupling::matrix::{largeness_experiment, monotone_couple_run, msample_stationary};
use gibbs_coupling::rng::seeded;

fn main() -> gibbs_coupling::error::Result<()> {
    let n = 20;
    let x0 = msample_stationary(n, &mut seeded(4))?;
    let r = monotone_couple_run(&x0, 200_000, 1.0, 9)?;
    println!("min domination gap {:.3e} over {} steps", r.min_domination_gap, r.steps);
    println!("matrix entries in [{:.4}, {:.4}]", r.min_entry, r.max_entry);
    println!("smallest simplex entry {:.3e} (threshold {:.3e})", r.min_simplex_entry, r.threshold);

    let large = largeness_experiment(n, n * n, 1.0, 200, 10)?;
    println!(
        "window inside bounds: {:.3} ± {:.3} (target >= {:.3})",
        large.frequency_inside, large.frequency_se, large.target
    );
    Ok(())
}
