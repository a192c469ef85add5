//! Spectral gap of the random-pair walk on a few Cayley graphs, next to the
//! comparison kernel used to bound the S-vector recursion.

use gibbs_coupling::group::{build_complete_cyclic, build_cyclic, build_dihedral, build_hypercube};
use gibbs_coupling::kernel::{base_walk_kernel, comparison_kernel, spectral_summary};

fn main() -> gibbs_coupling::error::Result<()> {
    let graphs = [
        ("Z_16, R = {±1}", build_cyclic(16, &[1, -1])?),
        ("Z_16, complete", build_complete_cyclic(16)?),
        ("hypercube k = 4", build_hypercube(4)?),
        ("dihedral k = 5", build_dihedral(5)?),
    ];
    println!("{:<18} {:>12} {:>12} {:>8}", "graph", "base gap", "comp gap", "ratio");
    for (name, cayley) in &graphs {
        let base = spectral_summary(&base_walk_kernel(cayley))?.gap;
        let comp = spectral_summary(&comparison_kernel(cayley)?)?.gap;
        println!("{name:<18} {base:>12.6} {comp:>12.6} {:>8.3}", comp / base);
    }

    let n = 16.0_f64;
    let closed = 2.0 / n * (1.0 - (std::f64::consts::TAU / n).cos());
    println!("\ncycle closed form (2/n)(1 - cos 2π/n) = {closed:.6}");
    Ok(())
}
