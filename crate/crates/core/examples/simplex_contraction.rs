//! Mean squared distance between a chain started at a point mass and a
//! proportionally coupled stationary copy.

use gibbs_coupling::group::build_complete_cyclic;
use gibbs_coupling::simplex::{contraction_experiment, SimplexState};

fn main() -> gibbs_coupling::error::Result<()> {
    let cayley = build_complete_cyclic(16)?;
    let x0 = SimplexState::point_mass(16, 0);
    let r = contraction_experiment(&cayley, &x0, 1800, 500, 10, 5)?;
    println!("{:>6} {:>12} {:>10} {:>12}", "t", "E|X-Y|²", "se", "bound");
    for p in &r.points {
        println!("{:>6} {:>12.4e} {:>10.2e} {:>12.4e}", p.t, p.mean_sq_distance, p.std_error, p.bound);
    }
    println!("bound holds: {}", r.bound_holds());
    Ok(())
}
