//! Subset coupling: a joint draw of the two chains' `λ`s, each exactly
//! uniform, that makes the total mass on a block `S` agree after the step
//! whenever the required linear relation lands inside `[0, 1]`.

use rand::Rng;
use serde::Serialize;

use super::PairChain;
use crate::error::{Error, Result};
use crate::matrix::MatrixState;
use crate::rng::ChainRng;
use crate::simplex::SimplexState;

/// A linear-relation value this close outside `[0, 1]` is clamped and
/// counted as a success; float noise would otherwise fail identical states.
pub const CLAMP_TOL: f64 = 1e-13;
/// Pair ranges at or below this are treated as collapsed.
pub const DEGENERATE_MASS: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubsetDraw {
    pub lambda_x: f64,
    pub lambda_y: f64,
    pub succeeded: bool,
}

/// Draws `u` uniform and sets `v = α + β u` with `β ≥ 1`. If `v` misses
/// `[0, 1]`, `v` is redrawn from the density proportional to
/// `1 − β⁻¹·1[v ∈ I]`, `I = [α, α + β] ∩ [0, 1]`, which tops the law of the
/// accepted values up to exactly uniform.
fn coupled_pair(alpha: f64, beta: f64, rng: &mut ChainRng) -> (f64, f64, bool) {
    let u: f64 = rng.random();
    let v = alpha + beta * u;
    if (-CLAMP_TOL..=1.0 + CLAMP_TOL).contains(&v) {
        return (u, v.clamp(0.0, 1.0), true);
    }
    let (lo, hi) = (alpha.clamp(0.0, 1.0), (alpha + beta).clamp(0.0, 1.0));
    let c = 1.0 / beta;
    let left = lo;
    let middle = (1.0 - c) * (hi - lo);
    let right = 1.0 - hi;
    let w = rng.random::<f64>() * (left + middle + right);
    let v = if w < left {
        w
    } else if w < left + middle {
        lo + (w - left) / (1.0 - c)
    } else {
        hi + (w - left - middle)
    };
    (u, v.clamp(0.0, 1.0), false)
}

/// Joint law of `(λ_x, λ_y)` aiming at `λ_x a_x = k + λ_y a_y`.
///
/// The chain with the wider pair range draws first (`y` on ties), so the
/// induced map has slope at least 1 and the remainder density is
/// nonnegative.
pub fn subset_draw(ax: f64, ay: f64, k: f64, rng: &mut ChainRng) -> Result<SubsetDraw> {
    if ax <= DEGENERATE_MASS {
        return Err(Error::DegeneratePairMass(ax));
    }
    if ay <= DEGENERATE_MASS {
        return Err(Error::DegeneratePairMass(ay));
    }
    if ax <= ay {
        let (lambda_y, lambda_x, succeeded) = coupled_pair(k / ax, ay / ax, rng);
        Ok(SubsetDraw {
            lambda_x,
            lambda_y,
            succeeded,
        })
    } else {
        let (lambda_x, lambda_y, succeeded) = coupled_pair(-k / ay, ax / ay, rng);
        Ok(SubsetDraw {
            lambda_x,
            lambda_y,
            succeeded,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubsetOutcome {
    pub draw: SubsetDraw,
    /// `|w(X', S) − w(Y', S)|` after a successful step.
    pub w_gap: Option<f64>,
}

fn block_weight(v: &[f64], s: &[usize]) -> f64 {
    s.iter().map(|&a| v[a]).sum()
}

/// Updates pair `(i, j)` in both chains, `i ∈ S` receiving `λ`, `j ∉ S`,
/// trying to equalize `Σ_{s∈S}` of the two states.
pub fn subset_step<C: PairChain>(
    x: &mut C,
    y: &mut C,
    s: &[usize],
    i: usize,
    j: usize,
    rng: &mut ChainRng,
) -> Result<SubsetOutcome> {
    debug_assert!(s.contains(&i) && !s.contains(&j));
    let rest = |v: &[f64]| block_weight(v, s) - v[i];
    let (bx, ax) = x.affine(i, j);
    let (by, ay) = y.affine(i, j);
    let k = (by + rest(y.coords())) - (bx + rest(x.coords()));
    let draw = subset_draw(ax, ay, k, rng)?;
    x.split(i, j, draw.lambda_x);
    y.split(i, j, draw.lambda_y);
    let w_gap = draw
        .succeeded
        .then(|| (block_weight(x.coords(), s) - block_weight(y.coords(), s)).abs());
    Ok(SubsetOutcome { draw, w_gap })
}

pub fn subset_step_simplex(
    x: &mut SimplexState,
    y: &mut SimplexState,
    s: &[usize],
    i: usize,
    j: usize,
    rng: &mut ChainRng,
) -> Result<SubsetOutcome> {
    subset_step(x, y, s, i, j, rng)
}

pub fn subset_step_matrix(
    x: &mut MatrixState,
    y: &mut MatrixState,
    s: &[usize],
    i: usize,
    j: usize,
    rng: &mut ChainRng,
) -> Result<SubsetOutcome> {
    subset_step(x, y, s, i, j, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::stats::ks_uniform;

    #[test]
    fn worked_simplex_example() {
        // λ_y = 0.5 forces λ_x = 0.6 and equal mass 0.3 on S = {0}.
        let x = SimplexState::new(vec![0.2, 0.3, 0.5]).unwrap();
        let y = SimplexState::new(vec![0.25, 0.35, 0.4]).unwrap();
        let (bx, ax) = x.affine(0, 1);
        let (by, ay) = y.affine(0, 1);
        assert!(ax < ay);
        let k = by - bx;
        let lambda_x = (k + 0.5 * ay) / ax;
        assert!((lambda_x - 0.6).abs() < 1e-15);
        let (mut x2, mut y2) = (x.clone(), y.clone());
        x2.split(0, 1, lambda_x);
        y2.split(0, 1, 0.5);
        assert!((x2.as_slice()[0] - 0.3).abs() < 1e-15);
        assert!((y2.as_slice()[0] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn success_equalizes_block_mass() {
        let mut rng = seeded(1);
        let mut successes = 0;
        for _ in 0..1000 {
            let mut x = SimplexState::new(vec![0.2, 0.3, 0.5]).unwrap();
            let mut y = SimplexState::new(vec![0.25, 0.35, 0.4]).unwrap();
            let out = subset_step_simplex(&mut x, &mut y, &[0], 0, 1, &mut rng).unwrap();
            if out.draw.succeeded {
                successes += 1;
                assert!(out.w_gap.unwrap() < 1e-12);
            } else {
                assert!(out.w_gap.is_none());
            }
        }
        // Success probability is (0.5 / 0.6)·|I| = 5/6.
        assert!((successes as f64 / 1000.0 - 5.0 / 6.0).abs() < 0.05);
    }

    #[test]
    fn large_lambda_y_fails() {
        // With λ_y above 5/6 the relation gives λ_x > 1.
        let mut rng = seeded(2);
        let mut saw_failure = false;
        for _ in 0..200 {
            let d = subset_draw(0.5, 0.6, 0.0, &mut rng).unwrap();
            if d.lambda_y > 5.0 / 6.0 + 1e-9 {
                assert!(!d.succeeded);
                saw_failure = true;
            } else {
                assert!(d.succeeded);
            }
        }
        assert!(saw_failure);
    }

    #[test]
    fn identical_states_always_succeed() {
        let mut rng = seeded(3);
        let x = MatrixState::new(vec![0.3, 1.4, 1.7, 0.6]).unwrap();
        for _ in 0..1000 {
            let (mut a, mut b) = (x.clone(), x.clone());
            let out = subset_step_matrix(&mut a, &mut b, &[0, 2], 0, 1, &mut rng).unwrap();
            assert!(out.draw.succeeded);
            assert_eq!(out.draw.lambda_x, out.draw.lambda_y);
        }
    }

    #[test]
    fn marginals_are_uniform() {
        let mut rng = seeded(4);
        let mut lx = Vec::new();
        let mut ly = Vec::new();
        for _ in 0..50_000 {
            let ax = 0.1 + rng.random::<f64>();
            let ay = 0.1 + rng.random::<f64>();
            let k = (rng.random::<f64>() - 0.5) * 0.6;
            let d = subset_draw(ax, ay, k, &mut rng).unwrap();
            lx.push(d.lambda_x);
            ly.push(d.lambda_y);
        }
        assert!(ks_uniform(&lx).p_value > 0.01);
        assert!(ks_uniform(&ly).p_value > 0.01);
    }

    #[test]
    fn degenerate_mass_is_an_error() {
        let mut rng = seeded(5);
        assert!(matches!(
            subset_draw(0.0, 0.5, 0.0, &mut rng),
            Err(Error::DegeneratePairMass(_))
        ));
    }
}
