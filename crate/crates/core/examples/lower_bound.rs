//! Eigenvector lower bound: `E<X_t, v>` decays like `β₂^t` from a start
//! built from the second eigenvector of the comparison kernel.

use gibbs_coupling::group::build_cyclic;
use gibbs_coupling::simplex::lower_bound_experiment;

fn main() -> gibbs_coupling::error::Result<()> {
    let cayley = build_cyclic(8, &[1, -1])?;
    let r = lower_bound_experiment(&cayley, 50, 0.5, 5000, 11, 3)?;
    println!("γ = {:.5}, <x0, v> = {:.5}", r.gamma, r.x0_dot_v);
    for p in &r.points {
        println!("t = {:>3}  mean {:.5} ± {:.5}  exact {:.5}", p.t, p.mean, p.std_error, p.exact);
    }
    println!("slope {:.5} vs {:.5}", r.slope, r.expected_slope);
    println!("TV lower bound {:.4}", r.tv_lower_bound);
    Ok(())
}
