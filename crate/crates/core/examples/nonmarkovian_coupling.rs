//! Two-phase coupling on both chains at the default recipe lengths.

use gibbs_coupling::coupling::{run_nonmarkovian_coupling, CayleyPairs, RunOptions, UniformPairs};
use gibbs_coupling::group::build_complete_cyclic;
use gibbs_coupling::harness::{matrix_recipe, simplex_recipe, DEFAULT_C};
use gibbs_coupling::kernel::{base_walk_kernel, spectral_summary};
use gibbs_coupling::matrix::{msample_stationary, MatrixState};
use gibbs_coupling::simplex::{sample_stationary, SimplexState};

fn main() -> gibbs_coupling::error::Result<()> {
    let n = 16;
    let cayley = build_complete_cyclic(n)?;
    let gap = spectral_summary(&base_walk_kernel(&cayley))?.gap;
    let (t1, t2) = simplex_recipe(n, gap, DEFAULT_C);
    let res = run_nonmarkovian_coupling(
        &CayleyPairs { cayley: &cayley },
        &SimplexState::point_mass(n, 0),
        |rng| Ok(sample_stationary(n, rng)),
        &RunOptions::new(t1, t2, 300, 1),
    )?;
    println!("simplex  T1 = {t1:>5} T2 = {t2:>4}  coupled {:.3}", res.coupling_frequency());

    let (t1, t2) = matrix_recipe(n, DEFAULT_C);
    let res = run_nonmarkovian_coupling(
        &UniformPairs { n },
        &MatrixState::extreme(n),
        |rng| msample_stationary(n, rng),
        &RunOptions::new(t1, t2, 300, 2),
    )?;
    println!("matrix   T1 = {t1:>5} T2 = {t2:>4}  coupled {:.3}", res.coupling_frequency());

    let short = run_nonmarkovian_coupling(
        &UniformPairs { n },
        &MatrixState::extreme(n),
        |rng| msample_stationary(n, rng),
        &RunOptions::new(t1, 10, 300, 3),
    )?;
    let unconnected = short.outcomes.iter().filter(|o| !o.connected).count();
    println!("matrix with T2 = 10: {unconnected} of 300 replicas never connect");
    Ok(())
}
