//! The two-phase coupling: proportional steps up to `T1`, then a replay of a
//! pre-drawn schedule with subset couplings at the marked times of its
//! partition process.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::partition::{PartitionProcess, UnionFind, UpdateSchedule};
use super::subset::subset_step;
use super::{proportional_step, PairChain};
use crate::error::{Error, Result};
use crate::group::Cayley;
use crate::kernel::{base_walk_kernel, spectral_summary};
use crate::matrix::draw_pair;
use crate::rng::{replica_rng, ChainRng};
use crate::stats::{proportion_se, Moments};

/// Where update coordinates come from.
pub trait PairSource: Sync {
    fn n(&self) -> usize;
    fn draw(&self, rng: &mut ChainRng) -> (usize, usize);
}

/// Uniform ordered pairs of distinct coordinates (the matrix chain).
#[derive(Debug, Clone, Copy)]
pub struct UniformPairs {
    pub n: usize,
}

impl PairSource for UniformPairs {
    fn n(&self) -> usize {
        self.n
    }

    fn draw(&self, rng: &mut ChainRng) -> (usize, usize) {
        draw_pair(self.n, rng)
    }
}

/// Pairs `(g, g·r)` for uniform `g ∈ G`, `r ∈ R`.
#[derive(Debug, Clone, Copy)]
pub struct CayleyPairs<'a> {
    pub cayley: &'a Cayley,
}

impl PairSource for CayleyPairs<'_> {
    fn n(&self) -> usize {
        self.cayley.order()
    }

    fn draw(&self, rng: &mut ChainRng) -> (usize, usize) {
        let g = rng.random_range(0..self.cayley.order());
        let r = self.cayley.gens().as_slice()[rng.random_range(0..self.cayley.degree())];
        (g, self.cayley.group().mul(g, r))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FailureKind {
    SubsetFailed,
    NotConnected,
    LargenessViolated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingOutcome {
    pub replica: usize,
    /// Connected schedule, every subset coupling succeeded, no collapsed pair.
    pub coupled: bool,
    pub failure_kind: Option<FailureKind>,
    pub first_failure_time: Option<usize>,
    pub tau_connect: Option<usize>,
    /// `max_i |X_T[i] − Y_T[i]|`.
    pub max_final_gap: f64,
    pub connected: bool,
    pub subset_couplings: usize,
    pub subset_failures: usize,
    /// Largest `|w(X, S) − w(Y, S)|` right after a successful subset step.
    pub max_w_gap: f64,
}

/// Per-step differences of one replica, kept for [`closeness_check`].
#[derive(Debug, Clone)]
pub struct CouplingTrace {
    pub replica: usize,
    pub l1_scale: f64,
    /// `‖X_{T1} − Y_{T1}‖₁`.
    pub initial_l1: f64,
    /// `X_t − Y_t` for `t = T1, …, T1 + T2`.
    pub diffs: Vec<Vec<f64>>,
    pub process: PartitionProcess,
    pub first_failure_time: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub t1: usize,
    pub t2: usize,
    pub replicas: usize,
    pub seed: u64,
    pub trace: bool,
    /// Treat the subset coupling with this (0-based, chronological) index as
    /// failed, drawing the two `λ`s independently.
    pub force_failure: Option<usize>,
}

impl RunOptions {
    pub fn new(t1: usize, t2: usize, replicas: usize, seed: u64) -> Self {
        RunOptions {
            t1,
            t2,
            replicas,
            seed,
            trace: false,
            force_failure: None,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunResult {
    pub outcomes: Vec<CouplingOutcome>,
    pub traces: Vec<CouplingTrace>,
}

impl RunResult {
    pub fn coupling_frequency(&self) -> f64 {
        let ok = self.outcomes.iter().filter(|o| o.coupled).count();
        ok as f64 / self.outcomes.len().max(1) as f64
    }

    /// Every coupled replica ends within `tol` entrywise.
    pub fn final_coupling_holds(&self, tol: f64) -> bool {
        self.outcomes
            .iter()
            .filter(|o| o.coupled)
            .all(|o| o.max_final_gap <= tol)
    }
}

fn diff<C: PairChain>(x: &C, y: &C) -> Vec<f64> {
    x.coords().iter().zip(y.coords()).map(|(a, b)| a - b).collect()
}

/// Runs independent replicas of the two-phase coupling. `Y` starts from
/// `stationary`, `X` from `x0`.
pub fn run_nonmarkovian_coupling<C, P, F>(
    source: &P,
    x0: &C,
    stationary: F,
    opts: &RunOptions,
) -> Result<RunResult>
where
    C: PairChain,
    P: PairSource,
    F: Fn(&mut ChainRng) -> Result<C> + Sync,
{
    if opts.t2 == 0 || opts.replicas == 0 {
        return Err(Error::InvalidParameter("coupling needs T2 >= 1 and replicas >= 1".into()));
    }
    if x0.coords().len() != source.n() {
        return Err(Error::InvalidParameter("start state size does not match the chain".into()));
    }
    let per: Vec<(CouplingOutcome, Option<CouplingTrace>)> = (0..opts.replicas)
        .into_par_iter()
        .map(|rep| run_replica(rep, source, x0, &stationary, opts))
        .collect::<Result<_>>()?;
    let mut result = RunResult::default();
    for (o, t) in per {
        result.outcomes.push(o);
        result.traces.extend(t);
    }
    Ok(result)
}

fn run_replica<C, P, F>(
    rep: usize,
    source: &P,
    x0: &C,
    stationary: &F,
    opts: &RunOptions,
) -> Result<(CouplingOutcome, Option<CouplingTrace>)>
where
    C: PairChain,
    P: PairSource,
    F: Fn(&mut ChainRng) -> Result<C>,
{
    let n = source.n();
    let mut rng = replica_rng(opts.seed, rep as u64);
    let mut y = stationary(&mut rng)?;
    let mut x = x0.clone();
    for _ in 0..opts.t1 {
        let (a, b) = source.draw(&mut rng);
        proportional_step(&mut x, &mut y, a, b, rng.random());
    }
    let initial_l1 = x.l1_distance(&y);
    let pairs = (0..opts.t2).map(|_| source.draw(&mut rng)).collect();
    let sched = UpdateSchedule::new(opts.t1, pairs)?;
    let process = PartitionProcess::build(&sched, n);
    let marked: Vec<_> = process.marked_ascending().collect();
    let mut next = 0;
    let mut in_s1 = vec![false; n];
    let mut diffs = opts.trace.then(|| vec![diff(&x, &y)]);
    let (mut couplings, mut failures) = (0usize, 0usize);
    let mut first_failure_time = None;
    let mut largeness_violated = false;
    let mut max_w_gap = 0.0f64;
    for t in sched.start()..sched.end() {
        let (a, b) = sched.at(t);
        if next < marked.len() && marked[next].t == t {
            let m = marked[next];
            next += 1;
            m.s1.iter().for_each(|&s| in_s1[s] = true);
            let (i, j) = if in_s1[a] { (a, b) } else { (b, a) };
            assert!(
                in_s1[i] && !in_s1[j],
                "marked update at t = {t} must cross the merged blocks"
            );
            m.s1.iter().for_each(|&s| in_s1[s] = false);
            let index = couplings;
            couplings += 1;
            let failed = if opts.force_failure == Some(index) {
                x.split(i, j, rng.random());
                y.split(i, j, rng.random());
                true
            } else {
                match subset_step(&mut x, &mut y, &m.s1, i, j, &mut rng) {
                    Ok(out) => {
                        if let Some(g) = out.w_gap {
                            max_w_gap = max_w_gap.max(g);
                        }
                        !out.draw.succeeded
                    }
                    Err(Error::DegeneratePairMass(_)) => {
                        largeness_violated = true;
                        proportional_step(&mut x, &mut y, i, j, rng.random());
                        true
                    }
                    Err(e) => return Err(e),
                }
            };
            if failed {
                failures += 1;
                first_failure_time.get_or_insert(t);
            }
        } else {
            proportional_step(&mut x, &mut y, a, b, rng.random());
        }
        if let Some(d) = diffs.as_mut() {
            d.push(diff(&x, &y));
        }
    }
    let connected = process.connected();
    let failure_kind = if !connected {
        Some(FailureKind::NotConnected)
    } else if largeness_violated {
        Some(FailureKind::LargenessViolated)
    } else if failures > 0 {
        Some(FailureKind::SubsetFailed)
    } else {
        None
    };
    let max_final_gap = x
        .coords()
        .iter()
        .zip(y.coords())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let outcome = CouplingOutcome {
        replica: rep,
        coupled: failure_kind.is_none(),
        failure_kind,
        first_failure_time,
        tau_connect: process.tau,
        max_final_gap,
        connected,
        subset_couplings: couplings,
        subset_failures: failures,
        max_w_gap,
    };
    let trace = diffs.map(|diffs| CouplingTrace {
        replica: rep,
        l1_scale: C::L1_SCALE,
        initial_l1,
        diffs,
        process,
        first_failure_time,
    });
    Ok((outcome, trace))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosenessReport {
    /// False when the schedule did not connect; nothing is asserted then.
    pub applicable: bool,
    pub checked_states: usize,
    /// `‖X_{T1} − Y_{T1}‖₁`.
    pub bound: f64,
    /// Largest block L1 difference over the checked states.
    pub max_block_l1: f64,
    pub ok: bool,
}

/// Tolerance added to the closeness bound.
pub const CLOSENESS_TOL: f64 = 1e-10;

/// Checks that every block of `P_t` carries an L1 difference no larger than
/// the full difference at `T1`, for every state up to the first failed
/// subset coupling.
pub fn closeness_check(trace: &CouplingTrace) -> ClosenessReport {
    let p = &trace.process;
    let mut report = ClosenessReport {
        applicable: p.connected(),
        checked_states: 0,
        bound: trace.initial_l1,
        max_block_l1: 0.0,
        ok: true,
    };
    if !report.applicable {
        return report;
    }
    let mut label = vec![0usize; p.n];
    let mut labels = 0;
    for block in p.partition_at(p.start) {
        for &a in &block {
            label[a] = labels;
        }
        labels += 1;
    }
    let marked: Vec<_> = p.marked_ascending().collect();
    let mut next = 0;
    for (k, d) in trace.diffs.iter().enumerate() {
        let t = p.start + k;
        if trace.first_failure_time.is_some_and(|f| t > f) {
            break;
        }
        let mut sums = vec![0.0; labels];
        for (a, v) in d.iter().enumerate() {
            sums[label[a]] += v.abs();
        }
        let worst = sums.into_iter().fold(0.0, f64::max) * trace.l1_scale;
        report.max_block_l1 = report.max_block_l1.max(worst);
        report.checked_states += 1;
        if next < marked.len() && marked[next].t == t {
            for &a in &marked[next].s1 {
                label[a] = labels;
            }
            labels += 1;
            next += 1;
        }
    }
    report.ok = report.max_block_l1 <= report.bound + CLOSENESS_TOL;
    report
}

#[derive(Debug, Clone, Serialize)]
pub struct ConnectednessReport {
    pub n: usize,
    pub replicas: usize,
    pub threshold: f64,
    pub bound: f64,
    /// Steps until the update graph connects; `None` past the cap.
    pub taus: Vec<Option<usize>>,
    /// Empirical `P[τ > threshold]`.
    pub tail: f64,
    pub tail_se: f64,
    pub mean_tau: f64,
}

impl ConnectednessReport {
    pub fn bound_holds(&self) -> bool {
        self.tail <= self.bound
    }
}

/// Steps of i.i.d. pairs from `source` until every coordinate is linked,
/// or `None` after `cap` steps.
pub fn connection_time<P: PairSource>(source: &P, cap: usize, rng: &mut ChainRng) -> Option<usize> {
    let mut uf = UnionFind::new(source.n());
    if uf.blocks() <= 1 {
        return Some(0);
    }
    for t in 1..=cap {
        let (a, b) = source.draw(rng);
        uf.union(a, b);
        if uf.blocks() == 1 {
            return Some(t);
        }
    }
    None
}

/// Connection times of i.i.d. schedules, against a tail `bound` at
/// `threshold`. By time reversal of an i.i.d. schedule this is also the law
/// of the backward `τ`.
pub fn connectedness_experiment<P: PairSource>(
    source: &P,
    threshold: f64,
    bound: f64,
    replicas: usize,
    seed: u64,
) -> ConnectednessReport {
    let cap = (100.0 * threshold) as usize + 1000;
    let taus: Vec<Option<usize>> = (0..replicas)
        .into_par_iter()
        .map(|rep| connection_time(source, cap, &mut replica_rng(seed, rep as u64)))
        .collect();
    let over = taus
        .iter()
        .filter(|t| t.is_none_or(|t| t as f64 > threshold))
        .count();
    let tail = over as f64 / replicas.max(1) as f64;
    let mean: Moments = taus.iter().flatten().map(|&t| t as f64).collect();
    ConnectednessReport {
        n: source.n(),
        replicas,
        threshold,
        bound,
        taus,
        tail,
        tail_se: proportion_se(tail, replicas.max(1)),
        mean_tau: mean.mean(),
    }
}

/// Matrix chain: threshold `(½ + 2ε) n ln n`, bound `2 n^{−ε}`.
pub fn matrix_connectedness(n: usize, epsilon: f64, replicas: usize, seed: u64) -> ConnectednessReport {
    let nf = n as f64;
    connectedness_experiment(
        &UniformPairs { n },
        (0.5 + 2.0 * epsilon) * nf * nf.ln(),
        2.0 * nf.powf(-epsilon),
        replicas,
        seed,
    )
}

/// Cayley chain: threshold `8 (C + 3) ln n / γ̂`, bound `2 n^{−C}`.
pub fn cayley_connectedness(cayley: &Cayley, c: f64, replicas: usize, seed: u64) -> Result<ConnectednessReport> {
    let nf = cayley.order() as f64;
    let gap = spectral_summary(&base_walk_kernel(cayley))?.gap;
    Ok(connectedness_experiment(
        &CayleyPairs { cayley },
        8.0 * (c + 3.0) * nf.ln() / gap,
        2.0 * nf.powf(-c),
        replicas,
        seed,
    ))
}
