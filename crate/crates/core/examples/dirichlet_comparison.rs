//! Random-test-function comparison of the comparison kernel's Dirichlet form
//! against the base walk.

use gibbs_coupling::group::build_dihedral;
use gibbs_coupling::kernel::comparison_report;

fn main() -> gibbs_coupling::error::Result<()> {
    let cayley = build_dihedral(5)?;
    let r = comparison_report(&cayley, 1000, 7)?;
    println!("min E(φ)/Ê(φ)  = {:.4}  (needs >= 0.25)", r.min_dirichlet_ratio);
    println!("max π̂/π        = {:.4}  (needs <= 2)", r.max_measure_ratio);
    println!("γ = {:.5}, γ̂/8 = {:.5}", r.gap, r.base_gap / 8.0);
    println!("all hold: {}", r.dirichlet_ok() && r.measure_ok() && r.gap_ok());
    Ok(())
}
