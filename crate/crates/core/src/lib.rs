//! Gibbs samplers on continuous state spaces and the machinery used to
//! study how fast they mix.
//!
//! Two chains are implemented:
//!
//! * the **simplex sampler** on `Δ_G`, where a finite group `G` with a
//!   symmetric generating set `R` restricts which coordinate pairs may
//!   exchange mass ([`simplex`]);
//! * the **narrow-matrix sampler** on nonnegative `n × 2` matrices with row
//!   sums 2 and column sums `n` ([`matrix`]).
//!
//! Around them sit the discrete kernels that control their contraction
//! ([`kernel`]), the proportional / subset couplings and the backward
//! partition process that drives the non-Markovian coupling ([`coupling`]),
//! and a configuration-driven experiment runner ([`harness`]).
//!
//! ```
//! use gibbs_coupling::group::build_cyclic;
//! use gibbs_coupling::kernel::{base_walk_kernel, spectral_summary};
//!
//! let cycle = build_cyclic(8, &[1, -1]).unwrap();
//! let summary = spectral_summary(&base_walk_kernel(&cycle)).unwrap();
//! let closed_form = (2.0 / 8.0) * (1.0 - (std::f64::consts::TAU / 8.0).cos());
//! assert!((summary.gap - closed_form).abs() < 1e-10);
//! ```
//!
//! Runnable walkthroughs of each capability live in `examples/`.

pub mod coupling;
pub mod error;
pub mod group;
pub mod harness;
pub mod kernel;
pub mod matrix;
pub mod rng;
pub mod simplex;
pub mod stats;

pub use error::{Error, Result};

/// Tolerance for exact algebraic identities (row sums, detailed balance).
pub const ALGEBRAIC_TOL: f64 = 1e-12;
/// Tolerance for eigen-quantities and the matrix L² identity.
pub const SPECTRAL_TOL: f64 = 1e-10;
/// Largest entrywise gap accepted as "coupled" at the end of a run.
pub const COUPLING_TOL: f64 = 1e-8;
/// Number of standard errors allowed in Monte Carlo comparisons.
pub const MC_SIGMAS: f64 = 4.0;
