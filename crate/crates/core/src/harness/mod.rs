//! Configuration-driven experiment runner with deterministic seeding and
//! machine-readable output.

pub mod config;
pub mod coupon;
pub mod oracle;
pub mod output;
pub mod runner;

pub use config::{Experiment, ExperimentConfig, Format, GroupSpec, OutputSpec};
pub use coupon::{coupon_collector_experiment, coupon_horizon, CouponReport};
pub use output::{Records, Row, RunManifest, RunStatus};
pub use runner::{execute, exit_code, run, Assertion, ExperimentOutput, RunSummary};

/// Default constant `C` for the coupling time recipes.
pub const DEFAULT_C: f64 = 30.0;

/// Phase lengths for the simplex chain:
/// `T1 = ⌈8(5C/6 + 7/2) ln n / γ̂⌉`, `T2 = ⌈8(C/6 − 7/2) ln n / γ̂⌉`
/// (at least 1).
pub fn simplex_recipe(n: usize, base_gap: f64, c: f64) -> (usize, usize) {
    let l = (n as f64).ln() / base_gap;
    let t1 = (8.0 * (5.0 * c / 6.0 + 3.5) * l).ceil().max(0.0) as usize;
    let t2 = (8.0 * (c / 6.0 - 3.5) * l).ceil().max(1.0) as usize;
    (t1, t2)
}

/// Phase lengths for the matrix chain with `a = 2(C + 18.25)/11`:
/// `T1 = ⌈(9a/2 − 11.25) n ln n⌉`, `T2 = ⌈(a − 7) n ln n⌉` (at least 1).
pub fn matrix_recipe(n: usize, c: f64) -> (usize, usize) {
    let a = 2.0 * (c + 18.25) / 11.0;
    let nl = n as f64 * (n as f64).ln();
    let t1 = ((4.5 * a - 11.25) * nl).ceil().max(0.0) as usize;
    let t2 = ((a - 7.0) * nl).ceil().max(1.0) as usize;
    (t1, t2)
}
