//! Couplings of two copies of a chain: proportional steps, subset steps that
//! equalize the mass of a block of coordinates, and the two-phase
//! non-Markovian coupling that combines them along a backward partition
//! process.

mod partition;
mod run;
mod subset;

pub use partition::{MarkedTime, PartitionProcess, UnionFind, UpdateSchedule};
pub use run::{
    cayley_connectedness, closeness_check, connection_time, connectedness_experiment,
    matrix_connectedness, run_nonmarkovian_coupling, CayleyPairs, ClosenessReport,
    ConnectednessReport, CouplingOutcome, CouplingTrace, FailureKind, PairSource, RunOptions,
    RunResult, UniformPairs, CLOSENESS_TOL,
};
pub use subset::{
    subset_draw, subset_step, subset_step_matrix, subset_step_simplex, SubsetDraw, SubsetOutcome,
    CLAMP_TOL, DEGENERATE_MASS,
};

use crate::matrix::{pair_range, MatrixState};
use crate::simplex::SimplexState;

/// A state whose moves re-split the combined value of two coordinates, with
/// the receiving coordinate affine and increasing in `λ`.
pub trait PairChain: Clone + Send + Sync {
    /// Weight of one coordinate difference in the full L1 distance (the
    /// matrix chain counts both columns).
    const L1_SCALE: f64;

    fn coords(&self) -> &[f64];

    /// Moves the pair with coordinate `i` receiving `λ`.
    fn split(&mut self, i: usize, j: usize, lambda: f64);

    /// `(b, a)` with the post-move value of `i` equal to `b + λ a`.
    fn affine(&self, i: usize, j: usize) -> (f64, f64);

    fn l1_distance(&self, other: &Self) -> f64 {
        Self::L1_SCALE
            * self
                .coords()
                .iter()
                .zip(other.coords())
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>()
    }
}

impl PairChain for SimplexState {
    const L1_SCALE: f64 = 1.0;

    fn coords(&self) -> &[f64] {
        self.as_slice()
    }

    fn split(&mut self, i: usize, j: usize, lambda: f64) {
        self.apply_pair(i, j, lambda);
    }

    fn affine(&self, i: usize, j: usize) -> (f64, f64) {
        (0.0, self.as_slice()[i] + self.as_slice()[j])
    }
}

impl PairChain for MatrixState {
    const L1_SCALE: f64 = 2.0;

    fn coords(&self) -> &[f64] {
        self.as_slice()
    }

    fn split(&mut self, i: usize, j: usize, lambda: f64) {
        self.apply(i, j, lambda);
    }

    fn affine(&self, i: usize, j: usize) -> (f64, f64) {
        let (lo, hi) = pair_range(self.as_slice()[i] + self.as_slice()[j]);
        (lo, hi - lo)
    }
}

/// Advances both chains with the same pair and `λ`.
pub fn proportional_step<C: PairChain>(x: &mut C, y: &mut C, i: usize, j: usize, lambda: f64) {
    x.split(i, j, lambda);
    y.split(i, j, lambda);
}
