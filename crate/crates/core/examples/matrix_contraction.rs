//! Per-step contraction of the two-column matrix chain, and the exact
//! identity behind it.

use gibbs_coupling::matrix::{contraction_identity_check, mcontraction_experiment, msample_stationary};
use gibbs_coupling::rng::seeded;

fn main() -> gibbs_coupling::error::Result<()> {
    let mut rng = seeded(1);
    let x = msample_stationary(10, &mut rng)?;
    let y = msample_stationary(10, &mut rng)?;
    let id = contraction_identity_check(&x, &y);
    println!("identity: lhs {:.6} rhs {:.6} residual {:.1e}", id.lhs, id.rhs, id.residual);

    let r = mcontraction_experiment(10, 400, 2000, 8, 2)?;
    println!("bound 1 - 2/(3n) = {:.5}", r.bound);
    for p in &r.points {
        match (p.ratio, p.ratio_se) {
            (Some(q), Some(se)) => println!("t = {:>4}  ratio {q:.5} ± {se:.5}", p.t),
            _ => println!("t = {:>4}  E|X-Y|² = {:.3e}", p.t, p.mean_sq_distance),
        }
    }
    println!("log-slope {:.5} vs ln bound {:.5}", r.slope, r.bound.ln());
    Ok(())
}
