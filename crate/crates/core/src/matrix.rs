//! The Gibbs sampler on narrow matrices: nonnegative `n × 2` matrices with
//! row sums 2 and column sums `n`. Only the first column `c` is stored; the
//! second is `2 − c`.
//!
//! A move picks distinct rows `i, j` and a uniform `λ` and re-splits
//! `c[i] + c[j]` uniformly over the feasible range, with `c[i]` increasing
//! in `λ`.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::build_complete_cyclic;
use crate::rng::{replica_rng, ChainRng};
use crate::simplex::{draw_move, split_pair};
use crate::stats::{checkpoint_times, irwin_hall_cdf, ols_slope, proportion_se, ratio_with_se, Moments};
use crate::{ALGEBRAIC_TOL, MC_SIGMAS, SPECTRAL_TOL};

/// Tolerance on `Σ c = n`.
pub const COLUMN_SUM_TOL: f64 = 1e-9;
/// Attempts before the rejection sampler gives up.
pub const REJECTION_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixState {
    c: Vec<f64>,
}

impl MatrixState {
    pub fn new(c: Vec<f64>) -> Result<Self> {
        let n = c.len();
        if n < 2 {
            return Err(Error::InvalidParameter("narrow matrices need n >= 2".into()));
        }
        if c.iter().any(|v| !(0.0..=2.0).contains(v)) {
            return Err(Error::InvalidParameter("entries must lie in [0, 2]".into()));
        }
        let sum: f64 = c.iter().sum();
        if (sum - n as f64).abs() > COLUMN_SUM_TOL {
            return Err(Error::InvalidParameter(format!("column sums to {sum}, expected {n}")));
        }
        Ok(MatrixState { c })
    }

    /// Every row pushed to one column: alternating 2 and 0, with a single 1
    /// when `n` is odd.
    pub fn extreme(n: usize) -> Self {
        let mut c: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 2.0 } else { 0.0 }).collect();
        if n % 2 == 1 {
            c[n - 1] = 1.0;
        }
        MatrixState { c }
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    /// First column.
    pub fn as_slice(&self) -> &[f64] {
        &self.c
    }

    pub fn second_column(&self) -> Vec<f64> {
        self.c.iter().map(|v| 2.0 - v).collect()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.c
    }

    pub fn apply(&mut self, i: usize, j: usize, lambda: f64) {
        split_matrix_pair(&mut self.c, i, j, lambda);
    }

    pub fn min_entry(&self) -> f64 {
        self.c.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_entry(&self) -> f64 {
        self.c.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `δ = 2 − c[i] − c[j]`: positive when the pair has room in the first
/// column, negative when it is over-full.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairGap {
    pub delta: f64,
}

impl PairGap {
    pub fn of(c: &[f64], i: usize, j: usize) -> Self {
        PairGap {
            delta: 2.0 - c[i] - c[j],
        }
    }
}

/// Feasible range `[lo, hi]` for the receiving entry of a pair with sum `s`.
#[inline]
pub fn pair_range(s: f64) -> (f64, f64) {
    ((s - 2.0).max(0.0), s.min(2.0))
}

/// Sets `c[i] = lo + λ(hi − lo)` and `c[j]` to the remainder of the pair.
///
/// For `δ ≥ 0` this is `c[i] = λ(2 − δ)`; for `δ < 0` it is
/// `c[i] = 2λ − (1 − λ)δ`. The larger share is computed directly and the
/// smaller by exact subtraction, so the pair sum is preserved bit for bit.
#[inline]
pub fn split_matrix_pair(c: &mut [f64], i: usize, j: usize, lambda: f64) {
    let s = c[i] + c[j];
    let (lo, hi) = pair_range(s);
    let w = hi - lo;
    let ci = (lo + lambda * w).min(hi);
    let cj = (lo + (1.0 - lambda) * w).min(hi);
    if ci >= cj {
        c[i] = ci;
        c[j] = s - ci;
    } else {
        c[j] = cj;
        c[i] = s - cj;
    }
}

/// Pure form of [`MatrixState::apply`].
pub fn mstep(state: &MatrixState, i: usize, j: usize, lambda: f64) -> MatrixState {
    let mut next = state.clone();
    next.apply(i, j, lambda);
    next
}

/// A uniformly random ordered pair of distinct rows.
pub fn draw_pair(n: usize, rng: &mut ChainRng) -> (usize, usize) {
    let i = rng.random_range(0..n);
    let j = (i + 1 + rng.random_range(0..n - 1)) % n;
    (i, j)
}

/// Uniform sample from the narrow matrices together with the number of
/// attempts it took. The first `n − 1` entries are uniform on `[0, 2]` and
/// the last is forced by the column sum; a draw is kept when that entry is
/// feasible.
pub fn msample_stationary_counted(n: usize, rng: &mut ChainRng) -> Result<(MatrixState, usize)> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("stationary sampling needs n >= 3, got {n}")));
    }
    let mut c = vec![0.0; n];
    for attempt in 1..=REJECTION_BUDGET {
        let mut sum = 0.0;
        for v in c.iter_mut().take(n - 1) {
            *v = 2.0 * rng.random::<f64>();
            sum += *v;
        }
        let last = n as f64 - sum;
        if (0.0..=2.0).contains(&last) {
            c[n - 1] = last;
            return Ok((MatrixState { c }, attempt));
        }
    }
    Err(Error::RejectionBudgetExceeded(REJECTION_BUDGET))
}

pub fn msample_stationary(n: usize, rng: &mut ChainRng) -> Result<MatrixState> {
    msample_stationary_counted(n, rng).map(|(s, _)| s)
}

/// Exact probability that one rejection attempt is accepted:
/// `P[n−2 ≤ Σ_{n−1} U[0,2] ≤ n]`.
pub fn acceptance_probability(n: usize) -> f64 {
    let k = n - 1;
    irwin_hall_cdf(k, n as f64 / 2.0) - irwin_hall_cdf(k, (n as f64 - 2.0) / 2.0)
}

/// `∫_{−∞}^x F_k`, where `F_k` is the Irwin–Hall CDF, using
/// `F_{k+1}(x) = ∫_{x−1}^x F_k`.
fn irwin_hall_cdf_integral(k: usize, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    (0..=x.ceil() as usize)
        .map(|j| irwin_hall_cdf(k + 1, x - j as f64))
        .sum()
}

/// Exact CDF of `c[0]` under the uniform law on narrow matrices of size `n`.
/// Its density is proportional to `F_{n−2}((n−u)/2) − F_{n−2}((n−2−u)/2)`.
pub fn stationary_marginal_cdf(n: usize, a: f64) -> f64 {
    let k = n - 2;
    let nf = n as f64;
    let mass = |a: f64| {
        let a = a.clamp(0.0, 2.0);
        (irwin_hall_cdf_integral(k, nf / 2.0) - irwin_hall_cdf_integral(k, (nf - a) / 2.0))
            - (irwin_hall_cdf_integral(k, (nf - 2.0) / 2.0)
                - irwin_hall_cdf_integral(k, (nf - 2.0 - a) / 2.0))
    };
    (mass(a) / mass(2.0)).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityReport {
    /// `Σ_{i≠j} (δ[i,j] − ε[i,j])²`.
    pub lhs: f64,
    /// `(n − 2) Σ` of squared differences over both columns.
    pub rhs: f64,
    pub residual: f64,
}

pub fn contraction_identity_check(x: &MatrixState, y: &MatrixState) -> IdentityReport {
    let n = x.n();
    assert_eq!(n, y.n());
    let (a, b) = (x.as_slice(), y.as_slice());
    let mut lhs = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let d = PairGap::of(a, i, j).delta - PairGap::of(b, i, j).delta;
                lhs += d * d;
            }
        }
    }
    let rhs = (n as f64 - 2.0) * sq_distance(x, y);
    IdentityReport {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
    }
}

/// Squared distance over both columns, `2 Σ (x[i] − y[i])²`.
pub fn sq_distance(x: &MatrixState, y: &MatrixState) -> f64 {
    2.0 * x
        .as_slice()
        .iter()
        .zip(y.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioPoint {
    pub t: usize,
    pub mean_sq_distance: f64,
    /// Estimated `E‖D_{t+1}‖² / E‖D_t‖²`; `None` where `E‖D_t‖²` is below
    /// the float floor.
    pub ratio: Option<f64>,
    pub ratio_se: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MatrixContractionReport {
    pub n: usize,
    pub replicas: usize,
    /// `1 − 2/(3n)`.
    pub bound: f64,
    pub identical_start: bool,
    pub points: Vec<RatioPoint>,
    pub slope: f64,
}

impl MatrixContractionReport {
    pub fn ratios_ok(&self) -> bool {
        self.points.iter().all(|p| match (p.ratio, p.ratio_se) {
            (Some(r), Some(se)) => r <= self.bound + MC_SIGMAS * se,
            _ => true,
        })
    }

    pub fn slope_ok(&self) -> bool {
        self.slope <= self.bound.ln()
    }
}

/// Below this, `E‖D‖²` is dominated by rounding and ratios are skipped.
pub const RATIO_FLOOR: f64 = 1e-24;

/// Independent one-step continuations averaged per replica and checkpoint.
/// `‖D_t‖²` is heavy-tailed at late `t`, so a few replicas carry most of the
/// mean; averaging their continuations estimates `E[‖D_{t+1}‖² | D_t]`
/// instead of a single draw of it.
pub const CONTINUATIONS: usize = 128;

/// Proportionally coupled `X` (from [`MatrixState::extreme`]) and `Y`
/// (stationary start), recording one-step contraction ratios at checkpoints.
pub fn mcontraction_experiment(
    n: usize,
    horizon: usize,
    replicas: usize,
    checkpoints: usize,
    seed: u64,
) -> Result<MatrixContractionReport> {
    contraction_from(&MatrixState::extreme(n), horizon, replicas, checkpoints, seed, false)
}

/// As [`mcontraction_experiment`] with a caller-supplied start; with
/// `same_start` the `Y` chain starts at `x0` too.
pub fn contraction_from(
    x0: &MatrixState,
    horizon: usize,
    replicas: usize,
    checkpoints: usize,
    seed: u64,
    same_start: bool,
) -> Result<MatrixContractionReport> {
    let n = x0.n();
    if n < 3 || replicas == 0 {
        return Err(Error::InvalidParameter("need n >= 3 and replicas >= 1".into()));
    }
    let times = checkpoint_times(horizon, checkpoints);
    let runs: Vec<Vec<(f64, f64)>> = (0..replicas)
        .into_par_iter()
        .map(|rep| -> Result<Vec<(f64, f64)>> {
            let mut rng = replica_rng(seed, rep as u64);
            let mut y = if same_start { x0.clone() } else { msample_stationary(n, &mut rng)? };
            let mut x = x0.clone();
            let mut t = 0;
            let mut out = Vec::with_capacity(times.len());
            let advance = |x: &mut MatrixState, y: &mut MatrixState, rng: &mut ChainRng| {
                let (i, j) = draw_pair(n, rng);
                let lambda = rng.random();
                x.apply(i, j, lambda);
                y.apply(i, j, lambda);
            };
            for &target in &times {
                while t < target {
                    advance(&mut x, &mut y, &mut rng);
                    t += 1;
                }
                let before = sq_distance(&x, &y);
                let mut after = 0.0;
                for _ in 0..CONTINUATIONS {
                    let mut x1 = x.clone();
                    let mut y1 = y.clone();
                    advance(&mut x1, &mut y1, &mut rng);
                    after += sq_distance(&x1, &y1);
                }
                out.push((before, after / CONTINUATIONS as f64));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let identical_start = runs.iter().all(|r| r[0].0 == 0.0);
    let mut points = Vec::with_capacity(times.len());
    for (c, &t) in times.iter().enumerate() {
        let before: Vec<f64> = runs.iter().map(|r| r[c].0).collect();
        let after: Vec<f64> = runs.iter().map(|r| r[c].1).collect();
        let mean: f64 = before.iter().sum::<f64>() / replicas as f64;
        let (ratio, ratio_se) = if mean > RATIO_FLOOR {
            let (r, se) = ratio_with_se(&after, &before);
            (Some(r), Some(se))
        } else {
            (None, None)
        };
        points.push(RatioPoint {
            t,
            mean_sq_distance: mean,
            ratio,
            ratio_se,
        });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = points
        .iter()
        .filter(|p| p.mean_sq_distance > RATIO_FLOOR)
        .map(|p| (p.t as f64, p.mean_sq_distance.ln()))
        .unzip();
    Ok(MatrixContractionReport {
        n,
        replicas,
        bound: 1.0 - 2.0 / (3.0 * n as f64),
        identical_start,
        points,
        slope: if xs.len() >= 2 { ols_slope(&xs, &ys) } else { f64::NAN },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotoneReport {
    pub n: usize,
    pub steps: usize,
    /// `min_{t,i} c_t[i] − S_t[i]`.
    pub min_domination_gap: f64,
    pub min_entry: f64,
    pub max_entry: f64,
    pub min_simplex_entry: f64,
    /// `n^{−5.5−k}`.
    pub threshold: f64,
    pub below_threshold: bool,
    pub above_upper_threshold: bool,
}

/// Runs the matrix chain from `x0` and a simplex chain on the complete
/// Cayley graph of `Z_n` from `S_0 = x0 / n` under shared `(i, j, λ)`,
/// checking `c_t[i] ≥ S_t[i]` at every step.
pub fn monotone_couple_run(x0: &MatrixState, steps: usize, k: f64, seed: u64) -> Result<MonotoneReport> {
    let n = x0.n();
    let cayley = build_complete_cyclic(n)?;
    let mut rng = replica_rng(seed, 0);
    let mut x = x0.clone();
    let mut s: Vec<f64> = x0.as_slice().iter().map(|v| v / n as f64).collect();
    let gap0 = x
        .as_slice()
        .iter()
        .zip(&s)
        .map(|(a, b)| a - b)
        .fold(f64::INFINITY, f64::min);
    let mut report = MonotoneReport {
        n,
        steps,
        min_domination_gap: gap0,
        min_entry: x.min_entry(),
        max_entry: x.max_entry(),
        min_simplex_entry: s.iter().copied().fold(f64::INFINITY, f64::min),
        threshold: (n as f64).powf(-5.5 - k),
        below_threshold: false,
        above_upper_threshold: false,
    };
    for t in 1..=steps {
        let draw = draw_move(&cayley, &mut rng);
        let (i, j) = draw.pair(&cayley);
        x.apply(i, j, draw.lambda);
        split_pair(&mut s, i, j, draw.lambda);
        for a in [i, j] {
            let gap = x.c[a] - s[a];
            report.min_domination_gap = report.min_domination_gap.min(gap);
            if gap < -ALGEBRAIC_TOL {
                return Err(Error::DominationViolated { t, i: a, gap });
            }
            report.min_entry = report.min_entry.min(x.c[a]);
            report.max_entry = report.max_entry.max(x.c[a]);
            report.min_simplex_entry = report.min_simplex_entry.min(s[a]);
        }
    }
    report.below_threshold = report.min_entry <= report.threshold;
    report.above_upper_threshold = report.max_entry >= 2.0 - report.threshold;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct MatrixLargenessReport {
    pub n: usize,
    pub window: usize,
    pub k: f64,
    pub threshold: f64,
    /// Fraction of replicas whose entries stayed inside
    /// `(n^{−5.5−k}, 2 − n^{−5.5−k})` over the whole window.
    pub frequency_inside: f64,
    pub frequency_se: f64,
    /// `1 − 2n^{−k}`.
    pub target: f64,
    pub min_entries: Vec<f64>,
    pub max_entries: Vec<f64>,
}

impl MatrixLargenessReport {
    pub fn ok(&self) -> bool {
        self.frequency_inside >= self.target - MC_SIGMAS * self.frequency_se
    }
}

/// Stationary chains run for `window` steps; records the extreme entries
/// seen by each replica.
pub fn largeness_experiment(n: usize, window: usize, k: f64, replicas: usize, seed: u64) -> Result<MatrixLargenessReport> {
    let extremes: Vec<(f64, f64)> = (0..replicas)
        .into_par_iter()
        .map(|rep| -> Result<(f64, f64)> {
            let mut rng = replica_rng(seed, rep as u64);
            let mut x = msample_stationary(n, &mut rng)?;
            let (mut lo, mut hi) = (x.min_entry(), x.max_entry());
            for _ in 0..window {
                let (i, j) = draw_pair(n, &mut rng);
                x.apply(i, j, rng.random());
                lo = lo.min(x.c[i]).min(x.c[j]);
                hi = hi.max(x.c[i]).max(x.c[j]);
            }
            Ok((lo, hi))
        })
        .collect::<Result<_>>()?;
    let threshold = (n as f64).powf(-5.5 - k);
    let inside = extremes
        .iter()
        .filter(|(lo, hi)| *lo > threshold && *hi < 2.0 - threshold)
        .count() as f64
        / replicas as f64;
    Ok(MatrixLargenessReport {
        n,
        window,
        k,
        threshold,
        frequency_inside: inside,
        frequency_se: proportion_se(inside, replicas),
        target: 1.0 - 2.0 * (n as f64).powf(-k),
        min_entries: extremes.iter().map(|e| e.0).collect(),
        max_entries: extremes.iter().map(|e| e.1).collect(),
    })
}

/// Largest identity residual over `pairs` random stationary pairs.
pub fn identity_sweep(n: usize, pairs: usize, seed: u64) -> Result<f64> {
    let residuals: Vec<f64> = (0..pairs)
        .into_par_iter()
        .map(|p| -> Result<f64> {
            let mut rng = replica_rng(seed, p as u64);
            let x = msample_stationary(n, &mut rng)?;
            let y = msample_stationary(n, &mut rng)?;
            Ok(contraction_identity_check(&x, &y).residual)
        })
        .collect::<Result<_>>()?;
    Ok(residuals.into_iter().fold(0.0, f64::max))
}

/// True when the identity residual is within the spectral tolerance.
pub fn identity_ok(residual: f64) -> bool {
    residual <= SPECTRAL_TOL
}

/// Moments of `c[0]` over `samples` stationary draws.
pub fn first_entry_moments(n: usize, samples: usize, rng: &mut ChainRng) -> Result<Moments> {
    let mut m = Moments::new();
    for _ in 0..samples {
        m.push(msample_stationary(n, rng)?.c[0]);
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::stats::ks_test;

    #[test]
    fn room_in_first_column_endpoint() {
        let x = MatrixState::new(vec![0.5, 1.2, 1.3]).unwrap();
        assert!((PairGap::of(x.as_slice(), 0, 1).delta - 0.3).abs() < 1e-15);
        let y = mstep(&x, 0, 1, 1.0);
        assert!((y.as_slice()[0] - 1.7).abs() < 1e-15);
        assert_eq!(y.as_slice()[1], 0.0);
    }

    #[test]
    fn over_full_endpoint() {
        let x = MatrixState::new(vec![1.8, 1.6, 0.0, 0.6]).unwrap();
        assert!((PairGap::of(x.as_slice(), 0, 1).delta + 1.4).abs() < 1e-15);
        let y = mstep(&x, 0, 1, 0.0);
        assert!((y.as_slice()[0] - 1.4).abs() < 1e-15);
        assert_eq!(y.as_slice()[1], 2.0);
    }

    #[test]
    fn delta_zero_matches_both_forms() {
        let x = MatrixState::new(vec![0.7, 1.3, 1.0]).unwrap();
        let y = mstep(&x, 0, 1, 0.25);
        assert!((y.as_slice()[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn monotone_in_lambda_and_sum_exact() {
        let mut rng = seeded(4);
        let mut x = msample_stationary(6, &mut rng).unwrap();
        for _ in 0..1_000_000 {
            let (i, j) = draw_pair(6, &mut rng);
            let (l1, l2): (f64, f64) = (rng.random(), rng.random());
            let (lo, hi) = (l1.min(l2), l1.max(l2));
            let a = mstep(&x, i, j, lo);
            let b = mstep(&x, i, j, hi);
            assert!(a.c[i] <= b.c[i] + 1e-15);
            assert_eq!(a.c[i] + a.c[j], x.c[i] + x.c[j]);
            assert!((0.0..=2.0).contains(&a.c[i]) && (0.0..=2.0).contains(&a.c[j]));
            x = a;
        }
        assert!((x.c.iter().sum::<f64>() - 6.0).abs() < 1e-9);
    }

    #[test]
    fn acceptance_rate_for_three_rows() {
        assert!((acceptance_probability(3) - 0.75).abs() < 1e-15);
        let mut rng = seeded(8);
        let mut attempts = 0usize;
        let mut accepted = 0usize;
        while attempts < 100_000 {
            let (_, a) = msample_stationary_counted(3, &mut rng).unwrap();
            attempts += a;
            accepted += 1;
        }
        let rate = accepted as f64 / attempts as f64;
        assert!((rate - 0.75).abs() < 0.01, "{rate}");
    }

    #[test]
    fn stationary_samples_are_valid() {
        let mut rng = seeded(2);
        for n in [3, 7, 40] {
            let x = msample_stationary(n, &mut rng).unwrap();
            assert!(MatrixState::new(x.into_vec()).is_ok());
        }
        assert!(msample_stationary(2, &mut rng).is_err());
    }

    #[test]
    fn stationary_mean_is_one() {
        let m = first_entry_moments(100, 100_000, &mut seeded(3)).unwrap();
        assert!((m.mean() - 1.0).abs() <= 3.0 * m.std_error());
    }

    #[test]
    fn stationary_marginal_matches_exact_density() {
        for n in [3usize, 4] {
            let mut rng = seeded(n as u64);
            let xs: Vec<f64> = (0..50_000)
                .map(|_| msample_stationary(n, &mut rng).unwrap().c[0])
                .collect();
            let ks = ks_test(&xs, |a| stationary_marginal_cdf(n, a));
            assert!(ks.p_value > 0.01, "n={n} {ks:?}");
        }
        // Swapping the two columns maps c[0] to 2 − c[0].
        assert!((stationary_marginal_cdf(3, 1.0) - 0.5).abs() < 1e-12);
        assert!((stationary_marginal_cdf(4, 1.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn identity_hand_value() {
        let x = MatrixState::new(vec![1.1, 0.9, 1.0]).unwrap();
        let y = MatrixState::new(vec![1.0, 1.0, 1.0]).unwrap();
        let r = contraction_identity_check(&x, &y);
        assert!((r.rhs - 0.04).abs() < 1e-14);
        assert!((r.lhs - 0.04).abs() < 1e-14);
        let same = contraction_identity_check(&x, &x);
        assert_eq!((same.lhs, same.rhs), (0.0, 0.0));
    }

    #[test]
    fn identity_on_random_pairs() {
        assert!(identity_ok(identity_sweep(10, 1000, 1).unwrap()));
    }

    #[test]
    fn same_sign_pair_contribution() {
        // δ, ε ≥ 0: both columns' squared change averages (4/3)(δ − ε)².
        let x = MatrixState::new(vec![0.5, 0.9, 1.6]).unwrap();
        let y = MatrixState::new(vec![0.6, 0.6, 1.8]).unwrap();
        let (d, e) = (PairGap::of(&x.c, 0, 1).delta, PairGap::of(&y.c, 0, 1).delta);
        let mut rng = seeded(1);
        let m: Moments = (0..200_000)
            .map(|_| {
                let l = rng.random();
                let (a, b) = (mstep(&x, 0, 1, l), mstep(&y, 0, 1, l));
                2.0 * ((a.c[0] - b.c[0]).powi(2) + (a.c[1] - b.c[1]).powi(2))
            })
            .collect();
        let want = 4.0 / 3.0 * (d - e).powi(2);
        assert!((m.mean() - want).abs() <= 4.0 * m.std_error(), "{} {}", m.mean(), want);
    }

    #[test]
    fn identical_start_is_flagged() {
        let r = contraction_from(&MatrixState::extreme(5), 10, 5, 3, 1, true).unwrap();
        assert!(r.identical_start);
        assert!(r.points.iter().all(|p| p.ratio.is_none()));
    }

    #[test]
    fn contraction_ratio_small_n() {
        let r = mcontraction_experiment(6, 100, 400, 5, 2).unwrap();
        assert!(!r.identical_start);
        assert!(r.ratios_ok(), "{r:?}");
    }

    #[test]
    fn domination_holds() {
        let x0 = msample_stationary(8, &mut seeded(5)).unwrap();
        let r = monotone_couple_run(&x0, 50_000, 1.0, 6).unwrap();
        assert!(r.min_domination_gap >= -1e-12);
        let r0 = monotone_couple_run(&MatrixState::extreme(8), 0, 1.0, 6).unwrap();
        assert!(r0.min_domination_gap >= 0.0);
    }
}
