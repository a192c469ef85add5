//! The Gibbs sampler on `Δ_G`: a uniform `g ∈ G` and `r ∈ R` select the
//! coordinate pair `(g, g·r)`, whose combined mass is re-split by a uniform
//! `λ`.

use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Cayley, GroupTable};
use crate::kernel::{
    base_walk_kernel, comparison_kernel, edge_walk_kernel, spectral_decomposition,
    spectral_summary, TransitionKernel,
};
use crate::rng::{replica_rng, ChainRng};
use crate::stats::{checkpoint_times, ols_slope, proportion_se, Moments};
use crate::{ALGEBRAIC_TOL, MC_SIGMAS};

/// Steps between renormalizations in [`SimplexChain`].
pub const RENORM_INTERVAL: u64 = 1_000_000;
/// Largest accumulated sum drift tolerated before a renormalization.
pub const MAX_SUM_DRIFT: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexState {
    x: Vec<f64>,
}

impl SimplexState {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::InvalidParameter("empty simplex state".into()));
        }
        if x.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidParameter("simplex entries must be finite and >= 0".into()));
        }
        let sum: f64 = x.iter().sum();
        if (sum - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(Error::InvalidParameter(format!("simplex entries sum to {sum}")));
        }
        Ok(SimplexState { x })
    }

    pub fn uniform(n: usize) -> Self {
        SimplexState {
            x: vec![1.0 / n as f64; n],
        }
    }

    pub fn point_mass(n: usize, at: usize) -> Self {
        let mut x = vec![0.0; n];
        x[at] = 1.0;
        SimplexState { x }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.x
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.x
    }

    pub fn sum(&self) -> f64 {
        crate::stats::compensated_sum(&self.x)
    }

    /// Rescales to unit mass and returns the drift `|Σx − 1|` that was removed.
    pub fn renormalize(&mut self) -> f64 {
        let s = self.sum();
        for v in &mut self.x {
            *v /= s;
        }
        (s - 1.0).abs()
    }

    pub fn apply_move(&mut self, cayley: &Cayley, draw: &MoveDraw) {
        let (a, b) = draw.pair(cayley);
        split_pair(&mut self.x, a, b, draw.lambda);
    }

    /// Re-splits the mass of coordinates `a` and `b`, giving `a` the share `λ`.
    pub fn apply_pair(&mut self, a: usize, b: usize, lambda: f64) {
        split_pair(&mut self.x, a, b, lambda);
    }

    pub fn min_entry(&self) -> f64 {
        self.x.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// One update: base element `g`, generator index `r` into `R`, and `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoveDraw {
    pub g: usize,
    pub r: usize,
    pub lambda: f64,
}

impl MoveDraw {
    /// The updated coordinates `(g, g·r)`; the first receives `λ`.
    pub fn pair(&self, cayley: &Cayley) -> (usize, usize) {
        let r = cayley.gens().as_slice()[self.r];
        (self.g, cayley.group().mul(self.g, r))
    }
}

pub fn draw_move(cayley: &Cayley, rng: &mut ChainRng) -> MoveDraw {
    MoveDraw {
        g: rng.random_range(0..cayley.order()),
        r: rng.random_range(0..cayley.degree()),
        lambda: rng.random(),
    }
}

/// Sets `x[a] = λ(x[a]+x[b])`, `x[b] = (1−λ)(x[a]+x[b])`.
///
/// The larger share is formed by multiplication and the smaller by
/// subtraction, which is exact, so the pair sum is preserved bit for bit.
#[inline]
pub fn split_pair(x: &mut [f64], a: usize, b: usize, lambda: f64) {
    let s = x[a] + x[b];
    if lambda >= 0.5 {
        let big = lambda * s;
        x[a] = big;
        x[b] = s - big;
    } else {
        let big = (1.0 - lambda) * s;
        x[b] = big;
        x[a] = s - big;
    }
}

/// Pure form of [`SimplexState::apply_move`].
pub fn step(state: &SimplexState, cayley: &Cayley, draw: &MoveDraw) -> SimplexState {
    let mut next = state.clone();
    next.apply_move(cayley, draw);
    next
}

/// A uniform point of the simplex: normalized i.i.d. unit exponentials.
pub fn sample_stationary(n: usize, rng: &mut ChainRng) -> SimplexState {
    let mut x: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let s: f64 = x.iter().sum();
    for v in &mut x {
        *v /= s;
    }
    SimplexState { x }
}

/// A chain that renormalizes every [`RENORM_INTERVAL`] steps and records the
/// largest drift it removed.
#[derive(Debug, Clone)]
pub struct SimplexChain {
    pub state: SimplexState,
    steps: u64,
    max_drift: f64,
}

impl SimplexChain {
    pub fn new(state: SimplexState) -> Self {
        SimplexChain {
            state,
            steps: 0,
            max_drift: 0.0,
        }
    }

    pub fn advance(&mut self, cayley: &Cayley, draw: &MoveDraw) {
        self.state.apply_move(cayley, draw);
        self.steps += 1;
        if self.steps.is_multiple_of(RENORM_INTERVAL) {
            self.max_drift = self.max_drift.max(self.state.renormalize());
        }
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Largest drift seen so far, including the current unrenormalized one.
    pub fn max_drift(&self) -> f64 {
        self.max_drift.max((self.state.sum() - 1.0).abs())
    }

    pub fn drift_ok(&self) -> bool {
        self.max_drift() <= MAX_SUM_DRIFT
    }
}

/// Pair correlations `s[h] = Σ_g d[g]·d[g·h]` with `d = x − y`.
///
/// Right translation matches the move structure `(g, g·r)`, which keeps the
/// one-step recursion closed on non-abelian groups; on abelian groups it is
/// the same as left translation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SVector {
    pub s: Vec<f64>,
    pub identity: usize,
}

impl SVector {
    /// The rescaled view with the identity entry halved.
    pub fn u(&self) -> Vec<f64> {
        let mut u = self.s.clone();
        u[self.identity] *= 0.5;
        u
    }

    /// `Σ_h s[h]`, zero for any pair of points on the simplex.
    pub fn zero_sum_residual(&self) -> f64 {
        self.s.iter().sum()
    }

    pub fn cauchy_schwarz_holds(&self, tol: f64) -> bool {
        let top = self.s[self.identity];
        top >= -tol && self.s.iter().all(|v| v.abs() <= top + tol)
    }
}

pub fn s_vector(x: &[f64], y: &[f64], group: &GroupTable) -> SVector {
    let n = group.order();
    assert_eq!(x.len(), n);
    assert_eq!(y.len(), n);
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let s = (0..n)
        .map(|h| (0..n).map(|g| d[g] * d[group.mul(g, h)]).sum())
        .collect();
    SVector {
        s,
        identity: group.identity(),
    }
}

/// Closed-form `E[S_{t+1}]` given `S_t`, via the comparison kernel on the
/// rescaled view.
pub fn s_recursion_target(k: &TransitionKernel, s: &SVector) -> Vec<f64> {
    let mut t = k.apply(&s.u());
    t[s.identity] *= 2.0;
    t
}

#[derive(Debug, Clone, Serialize)]
pub struct SRecursionReport {
    pub samples: usize,
    pub estimates: Vec<f64>,
    pub targets: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub max_abs_deviation: f64,
    /// Largest `|estimate − target| / SE` over entries with positive SE.
    pub max_z: f64,
    pub lambda_mean: f64,
    pub lambda_mean_se: f64,
    pub lambda_sq_mean: f64,
    pub lambda_sq_mean_se: f64,
}

impl SRecursionReport {
    pub fn within(&self, sigmas: f64) -> bool {
        self.estimates
            .iter()
            .zip(&self.targets)
            .zip(&self.std_errors)
            .all(|((e, t), se)| (e - t).abs() <= sigmas * se + ALGEBRAIC_TOL)
    }

    pub fn ok(&self) -> bool {
        self.within(MC_SIGMAS)
    }
}

const MC_CHUNK: usize = 1 << 14;

fn chunked<T: Send, F>(samples: usize, seed: u64, f: F) -> Vec<T>
where
    F: Fn(usize, &mut ChainRng) -> T + Sync,
{
    let chunks = samples.div_ceil(MC_CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = MC_CHUNK.min(samples - c * MC_CHUNK);
            f(len, &mut replica_rng(seed, c as u64))
        })
        .collect()
}

fn merge_columns(parts: Vec<Vec<Moments>>, width: usize) -> Vec<Moments> {
    let mut acc = vec![Moments::new(); width];
    for part in parts {
        for (a, p) in acc.iter_mut().zip(&part) {
            a.merge(p);
        }
    }
    acc
}

/// Monte Carlo `E[S_{t+1}^h | X_t = x, Y_t = y]` under one proportionally
/// coupled step, against the closed form.
pub fn check_s_recursion(
    x: &SimplexState,
    y: &SimplexState,
    cayley: &Cayley,
    samples: usize,
    seed: u64,
) -> Result<SRecursionReport> {
    let group = cayley.group();
    let n = cayley.order();
    let k = comparison_kernel(cayley)?;
    let targets = s_recursion_target(&k, &s_vector(x.as_slice(), y.as_slice(), group));
    let parts = chunked(samples, seed, |len, rng| {
        let mut cols = vec![Moments::new(); n + 2];
        for _ in 0..len {
            let draw = draw_move(cayley, rng);
            let (xs, ys) = (step(x, cayley, &draw), step(y, cayley, &draw));
            let s = s_vector(xs.as_slice(), ys.as_slice(), group);
            for (c, v) in cols.iter_mut().zip(&s.s) {
                c.push(*v);
            }
            cols[n].push(draw.lambda);
            cols[n + 1].push(draw.lambda * draw.lambda);
        }
        cols
    });
    let cols = merge_columns(parts, n + 2);
    let estimates: Vec<f64> = cols[..n].iter().map(Moments::mean).collect();
    let std_errors: Vec<f64> = cols[..n].iter().map(Moments::std_error).collect();
    let mut max_abs_deviation = 0.0f64;
    let mut max_z = 0.0f64;
    for h in 0..n {
        let dev = (estimates[h] - targets[h]).abs();
        max_abs_deviation = max_abs_deviation.max(dev);
        if std_errors[h] > 0.0 {
            max_z = max_z.max(dev / std_errors[h]);
        }
    }
    Ok(SRecursionReport {
        samples,
        estimates,
        targets,
        std_errors,
        max_abs_deviation,
        max_z,
        lambda_mean: cols[n].mean(),
        lambda_mean_se: cols[n].std_error(),
        lambda_sq_mean: cols[n + 1].mean(),
        lambda_sq_mean_se: cols[n + 1].std_error(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MeanUpdateReport {
    pub estimates: Vec<f64>,
    pub targets: Vec<f64>,
    pub std_errors: Vec<f64>,
}

impl MeanUpdateReport {
    pub fn ok(&self) -> bool {
        self.estimates
            .iter()
            .zip(&self.targets)
            .zip(&self.std_errors)
            .all(|((e, t), se)| (e - t).abs() <= MC_SIGMAS * se + ALGEBRAIC_TOL)
    }
}

/// Monte Carlo `E[X_{t+1} | X_t = x]` against `K x` for the edge walk `K`.
pub fn mean_update_check(
    x: &SimplexState,
    cayley: &Cayley,
    samples: usize,
    seed: u64,
) -> MeanUpdateReport {
    let n = cayley.order();
    let targets = edge_walk_kernel(cayley).apply(x.as_slice());
    let parts = chunked(samples, seed, |len, rng| {
        let mut cols = vec![Moments::new(); n];
        for _ in 0..len {
            let next = step(x, cayley, &draw_move(cayley, rng));
            for (c, v) in cols.iter_mut().zip(next.as_slice()) {
                c.push(*v);
            }
        }
        cols
    });
    let cols = merge_columns(parts, n);
    MeanUpdateReport {
        estimates: cols.iter().map(Moments::mean).collect(),
        targets,
        std_errors: cols.iter().map(Moments::std_error).collect(),
    }
}

/// The second eigenvector of the edge walk and the start concentrated on
/// its positive part.
#[derive(Debug, Clone, Serialize)]
pub struct LowerBoundStart {
    /// Unit-norm eigenvector for `β₂`.
    pub v: Vec<f64>,
    pub mu: Vec<f64>,
    pub beta2: f64,
}

impl LowerBoundStart {
    pub fn state(&self) -> SimplexState {
        SimplexState { x: self.mu.clone() }
    }

    pub fn mu_dot_v(&self) -> f64 {
        dot(&self.mu, &self.v)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

const EIGENSPACE_TOL: f64 = 1e-9;

/// Picks a canonical `β₂` eigenvector even when the eigenspace is
/// degenerate: the normalized projection of the standard basis vector that
/// projects most strongly onto it (lowest index on ties), then the sign that
/// puts at least half the squared mass on nonnegative entries.
pub fn lower_bound_init(k: &TransitionKernel) -> Result<LowerBoundStart> {
    let n = k.n();
    if n < 2 {
        return Err(Error::InvalidParameter("need at least two states".into()));
    }
    let dec = spectral_decomposition(k)?;
    let beta2 = dec.summary.eigenvalues[1];
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for (col, &lam) in dec.summary.eigenvalues.iter().enumerate() {
        if (lam - beta2).abs() > EIGENSPACE_TOL {
            continue;
        }
        let mut v: Vec<f64> = dec.vectors.column(col).iter().copied().collect();
        for b in &basis {
            let c = dot(&v, b);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm > EIGENSPACE_TOL {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    let weight = |a: usize| basis.iter().map(|b| b[a] * b[a]).sum::<f64>();
    let mut best = 0;
    for a in 1..n {
        if weight(a) > weight(best) + 1e-12 {
            best = a;
        }
    }
    let mut v = vec![0.0; n];
    for b in &basis {
        for (x, y) in v.iter_mut().zip(b) {
            *x += b[best] * y;
        }
    }
    let norm = dot(&v, &v).sqrt();
    for x in v.iter_mut() {
        *x /= norm;
        if x.abs() < EIGENSPACE_TOL * 1e-3 {
            *x = 0.0;
        }
    }
    let positive_mass: f64 = v.iter().filter(|x| **x >= 0.0).map(|x| x * x).sum();
    if positive_mass < 0.5 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    let total: f64 = v.iter().filter(|x| **x > 0.0).sum();
    if total < 1e-12 {
        return Err(Error::DegenerateEigenvector(total));
    }
    let mu = v.iter().map(|&x| if x > 0.0 { x / total } else { 0.0 }).collect();
    Ok(LowerBoundStart { v, mu, beta2 })
}

#[derive(Debug, Clone, Serialize)]
pub struct LowerBoundPoint {
    pub t: usize,
    pub mean: f64,
    pub std_error: f64,
    /// `(1−γ)^t ⟨X_0, v⟩`.
    pub exact: f64,
    /// Empirical `P[⟨X_t, v⟩ > d]`.
    pub tail: f64,
    /// `(1−γ)^t − d/⟨X_0, v⟩`.
    pub tail_bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LowerBoundReport {
    pub n: usize,
    pub gamma: f64,
    pub d: f64,
    pub replicas: usize,
    pub x0_dot_v: f64,
    pub points: Vec<LowerBoundPoint>,
    pub slope: f64,
    pub expected_slope: f64,
    /// Empirical `P[⟨Y, v⟩ > d]` for `Y` uniform.
    pub stationary_tail: f64,
    pub stationary_second_moment: f64,
    pub stationary_second_moment_se: f64,
    /// Empirical total-variation witness at the last checkpoint.
    pub tv_lower_bound: f64,
}

impl LowerBoundReport {
    pub fn slope_relative_error(&self) -> f64 {
        ((self.slope - self.expected_slope) / self.expected_slope).abs()
    }

    /// The bound `E⟨Y, v⟩² ≤ 2/n²`, allowing sampling error.
    pub fn stationary_moment_ok(&self) -> bool {
        let n = self.n as f64;
        self.stationary_second_moment <= 2.0 / (n * n) + MC_SIGMAS * self.stationary_second_moment_se
    }
}

/// Runs the sampler from the positive part of the `β₂` eigenvector of the
/// edge walk and tracks `⟨X_t, v⟩`.
pub fn lower_bound_experiment(
    cayley: &Cayley,
    horizon: usize,
    d: f64,
    replicas: usize,
    checkpoints: usize,
    seed: u64,
) -> Result<LowerBoundReport> {
    if horizon == 0 || d <= 0.0 || replicas == 0 {
        return Err(Error::InvalidParameter(
            "lower bound needs T >= 1, d > 0 and replicas >= 1".into(),
        ));
    }
    let n = cayley.order();
    let kernel = edge_walk_kernel(cayley);
    let start = lower_bound_init(&kernel)?;
    let times = checkpoint_times(horizon, checkpoints);
    let x0v = start.mu_dot_v();
    let runs: Vec<(Vec<f64>, f64)> = (0..replicas)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replica_rng(seed, rep as u64);
            let mut x = start.state();
            let mut out = Vec::with_capacity(times.len());
            let mut t = 0;
            for &target in &times {
                while t < target {
                    x.apply_move(cayley, &draw_move(cayley, &mut rng));
                    t += 1;
                }
                out.push(dot(x.as_slice(), &start.v));
            }
            let y = sample_stationary(n, &mut rng);
            (out, dot(y.as_slice(), &start.v))
        })
        .collect();
    let beta = start.beta2;
    let points: Vec<LowerBoundPoint> = times
        .iter()
        .enumerate()
        .map(|(c, &t)| {
            let m: Moments = runs.iter().map(|r| r.0[c]).collect();
            let tail = runs.iter().filter(|r| r.0[c] > d).count() as f64 / replicas as f64;
            LowerBoundPoint {
                t,
                mean: m.mean(),
                std_error: m.std_error(),
                exact: beta.powi(t as i32) * x0v,
                tail,
                tail_bound: beta.powi(t as i32) - d / x0v,
            }
        })
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = points
        .iter()
        .filter(|p| p.mean > 0.0)
        .map(|p| (p.t as f64, p.mean.ln()))
        .unzip();
    let stationary: Moments = runs.iter().map(|r| r.1 * r.1).collect();
    let stationary_tail = runs.iter().filter(|r| r.1 > d).count() as f64 / replicas as f64;
    let last_tail = points.last().map_or(0.0, |p| p.tail);
    Ok(LowerBoundReport {
        n,
        gamma: 1.0 - beta,
        d,
        replicas,
        x0_dot_v: x0v,
        slope: if xs.len() >= 2 { ols_slope(&xs, &ys) } else { f64::NAN },
        expected_slope: beta.ln(),
        points,
        stationary_tail,
        stationary_second_moment: stationary.mean(),
        stationary_second_moment_se: stationary.std_error(),
        tv_lower_bound: last_tail - stationary_tail,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ContractionPoint {
    pub t: usize,
    pub mean_sq_distance: f64,
    pub std_error: f64,
    /// `4n·exp(−⌊t γ̂ / 8⌋)`.
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimplexContractionReport {
    pub n: usize,
    pub base_gap: f64,
    pub replicas: usize,
    pub points: Vec<ContractionPoint>,
    /// Per-replica `‖X_t − Y_t‖²`, indexed `[checkpoint][replica]`.
    #[serde(skip)]
    pub samples: Vec<Vec<f64>>,
}

impl SimplexContractionReport {
    pub fn bound_holds(&self) -> bool {
        self.points.iter().all(|p| p.mean_sq_distance <= p.bound)
    }

    /// Non-increasing across checkpoints up to `MC_SIGMAS` combined SEs.
    pub fn monotone_within_error(&self) -> bool {
        self.points.windows(2).all(|w| {
            let se = (w[0].std_error.powi(2) + w[1].std_error.powi(2)).sqrt();
            w[1].mean_sq_distance <= w[0].mean_sq_distance + MC_SIGMAS * se
        })
    }
}

pub fn sq_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Proportionally coupled `X` (from `x0`) and `Y` (stationary start),
/// recording `E‖X_t − Y_t‖²` at checkpoints.
pub fn contraction_experiment(
    cayley: &Cayley,
    x0: &SimplexState,
    horizon: usize,
    replicas: usize,
    checkpoints: usize,
    seed: u64,
) -> Result<SimplexContractionReport> {
    if x0.n() != cayley.order() || replicas == 0 {
        return Err(Error::InvalidParameter(
            "start state must match the group order and replicas >= 1".into(),
        ));
    }
    let n = cayley.order();
    let base_gap = spectral_summary(&base_walk_kernel(cayley))?.gap;
    let times = checkpoint_times(horizon, checkpoints);
    let runs: Vec<Vec<f64>> = (0..replicas)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replica_rng(seed, rep as u64);
            let mut y = sample_stationary(n, &mut rng);
            let mut x = x0.clone();
            let mut t = 0;
            times
                .iter()
                .map(|&target| {
                    while t < target {
                        let draw = draw_move(cayley, &mut rng);
                        x.apply_move(cayley, &draw);
                        y.apply_move(cayley, &draw);
                        t += 1;
                    }
                    sq_distance(x.as_slice(), y.as_slice())
                })
                .collect()
        })
        .collect();
    let samples: Vec<Vec<f64>> = (0..times.len())
        .map(|c| runs.iter().map(|r| r[c]).collect())
        .collect();
    let points = times
        .iter()
        .zip(&samples)
        .map(|(&t, col)| {
            let m: Moments = col.iter().copied().collect();
            ContractionPoint {
                t,
                mean_sq_distance: m.mean(),
                std_error: m.std_error(),
                bound: 4.0 * n as f64 * (-((t as f64 * base_gap / 8.0).floor())).exp(),
            }
        })
        .collect();
    Ok(SimplexContractionReport {
        n,
        base_gap,
        replicas,
        points,
        samples,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SimplexLargenessReport {
    pub n: usize,
    pub steps: usize,
    pub k: f64,
    /// `T · n^{-2.5-k}`.
    pub threshold: f64,
    pub min_entries: Vec<f64>,
    /// Fraction of replicas whose running minimum stayed above the threshold.
    pub frequency_above: f64,
    pub frequency_se: f64,
}

/// Running minimum entry of a stationary-start chain over `steps` moves,
/// per replica.
pub fn largeness_experiment(
    cayley: &Cayley,
    steps: usize,
    k: f64,
    replicas: usize,
    seed: u64,
) -> SimplexLargenessReport {
    let n = cayley.order();
    let min_entries: Vec<f64> = (0..replicas)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replica_rng(seed, rep as u64);
            let mut x = sample_stationary(n, &mut rng);
            let mut lo = x.min_entry();
            for _ in 0..steps {
                let draw = draw_move(cayley, &mut rng);
                x.apply_move(cayley, &draw);
                let (a, b) = draw.pair(cayley);
                lo = lo.min(x.x[a]).min(x.x[b]);
            }
            lo
        })
        .collect();
    let threshold = steps.max(1) as f64 * (n as f64).powf(-2.5 - k);
    let above = min_entries.iter().filter(|&&m| m > threshold).count() as f64 / replicas as f64;
    SimplexLargenessReport {
        n,
        steps,
        k,
        threshold,
        min_entries,
        frequency_above: above,
        frequency_se: proportion_se(above, replicas),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_complete_cyclic, build_cyclic, build_dihedral};
    use crate::rng::seeded;
    use crate::stats::ks_uniform;

    #[test]
    fn uniform_is_fixed_by_half_split() {
        let c = build_cyclic(5, &[1, -1]).unwrap();
        let x = SimplexState::uniform(5);
        let y = step(&x, &c, &MoveDraw { g: 2, r: 0, lambda: 0.5 });
        assert_eq!(x, y);
    }

    #[test]
    fn lambda_one_pushes_pair_mass_to_g() {
        let c = build_cyclic(3, &[1, -1]).unwrap();
        let x = SimplexState::new(vec![0.2, 0.3, 0.5]).unwrap();
        let y = step(&x, &c, &MoveDraw { g: 0, r: 0, lambda: 1.0 });
        assert_eq!(y.as_slice(), &[0.5, 0.0, 0.5]);
    }

    #[test]
    fn pair_sum_is_bit_exact() {
        let c = build_cyclic(7, &[1, -1, 3, -3]).unwrap();
        let mut rng = seeded(3);
        let mut x = sample_stationary(7, &mut rng);
        for _ in 0..1_000_000 {
            let draw = draw_move(&c, &mut rng);
            let (a, b) = draw.pair(&c);
            let before = x.as_slice().to_vec();
            x.apply_move(&c, &draw);
            assert_eq!(before[a] + before[b], x.as_slice()[a] + x.as_slice()[b]);
            for i in (0..7).filter(|&i| i != a && i != b) {
                assert_eq!(before[i].to_bits(), x.as_slice()[i].to_bits());
            }
            assert!(x.as_slice()[a] >= 0.0 && x.as_slice()[b] >= 0.0);
        }
        assert!((x.sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stationary_two_point_marginal_is_uniform() {
        let mut rng = seeded(11);
        let xs: Vec<f64> = (0..100_000).map(|_| sample_stationary(2, &mut rng).as_slice()[0]).collect();
        assert!(ks_uniform(&xs).p_value > 0.01);
    }

    #[test]
    fn stationary_three_point_mean() {
        let mut rng = seeded(12);
        let m: Moments = (0..100_000).map(|_| sample_stationary(3, &mut rng).as_slice()[0]).collect();
        assert!((m.mean() - 1.0 / 3.0).abs() <= 3.0 * m.std_error());
        let x = sample_stationary(9, &mut rng);
        assert!(SimplexState::new(x.into_vec()).is_ok());
    }

    #[test]
    fn s_vector_basics() {
        let c = build_dihedral(3).unwrap();
        let mut rng = seeded(5);
        let x = sample_stationary(6, &mut rng);
        let y = sample_stationary(6, &mut rng);
        assert!(s_vector(x.as_slice(), x.as_slice(), c.group()).s.iter().all(|v| *v == 0.0));
        let s = s_vector(x.as_slice(), y.as_slice(), c.group());
        assert!((s.s[0] - sq_distance(x.as_slice(), y.as_slice())).abs() < 1e-15);
        assert!(s.zero_sum_residual().abs() < 1e-12);
        assert!(s.cauchy_schwarz_holds(1e-15));
    }

    #[test]
    fn s_recursion_matches_closed_form() {
        let c = build_cyclic(6, &[1, -1]).unwrap();
        let mut rng = seeded(9);
        let x = sample_stationary(6, &mut rng);
        let y = sample_stationary(6, &mut rng);
        let r = check_s_recursion(&x, &y, &c, 200_000, 1).unwrap();
        assert!(r.ok(), "{r:?}");
        assert!((r.lambda_mean - 0.5).abs() <= 4.0 * r.lambda_mean_se);
        assert!((r.lambda_sq_mean - 1.0 / 3.0).abs() <= 4.0 * r.lambda_sq_mean_se);
        let same = check_s_recursion(&x, &x, &c, 1000, 1).unwrap();
        assert!(same.estimates.iter().chain(&same.targets).all(|v| *v == 0.0));
    }

    #[test]
    fn mean_update_is_edge_walk() {
        let c = build_dihedral(4).unwrap();
        let x = sample_stationary(8, &mut seeded(2));
        assert!(mean_update_check(&x, &c, 200_000, 4).ok());
    }

    #[test]
    fn lower_bound_start_on_four_cycle() {
        let k = edge_walk_kernel(&build_cyclic(4, &[1, -1]).unwrap());
        let s = lower_bound_init(&k).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let want = [h, 0.0, -h, 0.0];
        for (a, b) in s.v.iter().zip(want) {
            assert!((a - b).abs() < 1e-10, "{:?}", s.v);
        }
        assert_eq!(s.mu.iter().filter(|m| **m > 0.0).count(), 1);
        assert!((s.mu.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(s.mu_dot_v() >= 1.0 / (2.0 * 2.0));
    }

    #[test]
    fn lower_bound_inner_product_bound_on_families() {
        for c in [
            build_cyclic(9, &[1, -1]).unwrap(),
            build_complete_cyclic(6).unwrap(),
            build_dihedral(5).unwrap(),
            crate::group::build_hypercube(4).unwrap(),
        ] {
            let s = lower_bound_init(&edge_walk_kernel(&c)).unwrap();
            let n = c.order() as f64;
            assert!(s.mu_dot_v() >= 1.0 / (2.0 * n.sqrt()) - 1e-12);
            assert!(s.mu.iter().all(|m| *m >= 0.0));
        }
    }

    #[test]
    fn lower_bound_experiment_starts_exactly() {
        let c = build_cyclic(8, &[1, -1]).unwrap();
        let r = lower_bound_experiment(&c, 20, 0.05, 500, 5, 3).unwrap();
        assert_eq!(r.points[0].t, 0);
        assert!((r.points[0].mean - r.x0_dot_v).abs() < 1e-15);
        assert_eq!(r.points[0].std_error, 0.0);
        assert!(r.stationary_moment_ok());
    }

    #[test]
    fn contraction_starts_below_bound() {
        let c = build_complete_cyclic(8).unwrap();
        let r = contraction_experiment(&c, &SimplexState::point_mass(8, 0), 300, 200, 4, 1).unwrap();
        assert!(r.bound_holds());
        assert!(r.monotone_within_error());
        assert!(r.points.last().unwrap().mean_sq_distance < r.points[0].mean_sq_distance);
    }

    #[test]
    fn drift_tracking() {
        let c = build_cyclic(5, &[1, -1]).unwrap();
        let mut rng = seeded(1);
        let mut chain = SimplexChain::new(sample_stationary(5, &mut rng));
        for _ in 0..10_000 {
            chain.advance(&c, &draw_move(&c, &mut rng));
        }
        assert!(chain.drift_ok());
        assert_eq!(chain.steps(), 10_000);
    }
}
