//! Monte Carlo check of the one-step expectation of the S-vector
//! `S^h = Σ_g d[g] d[g·h]` against `K·U`.

use gibbs_coupling::group::build_cyclic;
use gibbs_coupling::rng::seeded;
use gibbs_coupling::simplex::{check_s_recursion, sample_stationary};

fn main() -> gibbs_coupling::error::Result<()> {
    let cayley = build_cyclic(6, &[1, -1])?;
    let mut rng = seeded(3);
    let x = sample_stationary(6, &mut rng);
    let y = sample_stationary(6, &mut rng);
    let r = check_s_recursion(&x, &y, &cayley, 200_000, 11)?;
    println!("{:>2} {:>12} {:>12} {:>7}", "h", "estimate", "target", "z");
    for h in 0..6 {
        let z = (r.estimates[h] - r.targets[h]) / r.std_errors[h].max(f64::MIN_POSITIVE);
        println!("{h:>2} {:>12.6e} {:>12.6e} {z:>7.2}", r.estimates[h], r.targets[h]);
    }
    println!("E[λ] = {:.4}, E[λ²] = {:.4}", r.lambda_mean, r.lambda_sq_mean);
    Ok(())
}
