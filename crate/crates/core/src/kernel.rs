//! Discrete transition kernels on a Cayley graph: the base walk that defines
//! `γ̂`, the edge walk `K` governing `E[X_t]`, and the comparison chain that
//! drives the pair-correlation vector `S_t`.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::Cayley;
use crate::rng::replica_rng;
use crate::{ALGEBRAIC_TOL, SPECTRAL_TOL};

/// A row-stochastic matrix together with a reversing measure.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionKernel {
    n: usize,
    p: Vec<f64>,
    pi: Vec<f64>,
}

impl TransitionKernel {
    /// Wraps a row-major matrix and measure after checking stochasticity and
    /// detailed balance.
    pub fn new(n: usize, p: Vec<f64>, pi: Vec<f64>) -> Result<Self> {
        if p.len() != n * n || pi.len() != n {
            return Err(Error::InvalidParameter(format!(
                "kernel of size {n} needs {} entries and a length-{n} measure",
                n * n
            )));
        }
        let k = TransitionKernel { n, p, pi };
        k.check_stochastic()?;
        k.check_reversible()?;
        Ok(k)
    }

    fn check_stochastic(&self) -> Result<()> {
        for a in 0..self.n {
            let row = self.row(a);
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ALGEBRAIC_TOL || row.iter().any(|&x| x < 0.0) {
                return Err(Error::NonStochasticRow { row: a, sum });
            }
        }
        Ok(())
    }

    /// Largest detailed-balance residual `|π(a)p(a,b) − π(b)p(b,a)|`.
    pub fn detailed_balance_residual(&self) -> (usize, usize, f64) {
        let mut worst = (0, 0, 0.0);
        for a in 0..self.n {
            for b in (a + 1)..self.n {
                let err = (self.pi[a] * self.p(a, b) - self.pi[b] * self.p(b, a)).abs();
                if err > worst.2 {
                    worst = (a, b, err);
                }
            }
        }
        worst
    }

    fn check_reversible(&self) -> Result<()> {
        let (a, b, err) = self.detailed_balance_residual();
        if err > ALGEBRAIC_TOL {
            Err(Error::NotReversible { a, b, err })
        } else {
            Ok(())
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn p(&self, a: usize, b: usize) -> f64 {
        self.p[a * self.n + b]
    }

    pub fn row(&self, a: usize) -> &[f64] {
        &self.p[a * self.n..(a + 1) * self.n]
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    /// `(P v)[a] = Σ_b p(a,b) v[b]`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|a| self.row(a).iter().zip(v).map(|(p, x)| p * x).sum())
            .collect()
    }

    /// Row-major CSV with 17 significant digits per entry.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.n * self.n * 24);
        for a in 0..self.n {
            let cells: Vec<String> = self.row(a).iter().map(|x| format!("{x:.16e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

struct Builder {
    n: usize,
    p: Vec<f64>,
}

impl Builder {
    fn new(n: usize) -> Self {
        Builder {
            n,
            p: vec![0.0; n * n],
        }
    }

    fn add(&mut self, a: usize, b: usize, w: f64) {
        self.p[a * self.n + b] += w;
    }

    fn finish(self, pi: Vec<f64>) -> Result<TransitionKernel> {
        TransitionKernel::new(self.n, self.p, pi)
    }
}

fn uniform(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

/// The walk `Z_t`: a uniform draw of `(g, r)` swaps the roles of `g` and
/// `g·r`, so `z` moves to `z·s` with probability `2/(nm)` per `s ∈ R`.
pub fn base_walk_kernel(cayley: &Cayley) -> TransitionKernel {
    let (g, n, m) = (cayley.group(), cayley.order(), cayley.degree());
    let w = 1.0 / (n * m) as f64;
    let mut b = Builder::new(n);
    for z in 0..n {
        b.add(z, z, 1.0);
    }
    for a in 0..n {
        for r in cayley.gens().iter() {
            let c = g.mul(a, r);
            b.add(a, a, -w);
            b.add(a, c, w);
            b.add(c, c, -w);
            b.add(c, a, w);
        }
    }
    b.finish(uniform(n)).expect("base walk is stochastic and symmetric")
}

/// The edge walk: hold with probability `1 − 1/n`, otherwise step to `g·r`
/// for a uniform `r ∈ R`.
pub fn edge_walk_kernel(cayley: &Cayley) -> TransitionKernel {
    let (g, n, m) = (cayley.group(), cayley.order(), cayley.degree());
    let w = 1.0 / (n * m) as f64;
    let mut b = Builder::new(n);
    for a in 0..n {
        b.add(a, a, 1.0 - 1.0 / n as f64);
        for r in cayley.gens().iter() {
            b.add(a, g.mul(a, r), w);
        }
    }
    b.finish(uniform(n)).expect("edge walk is stochastic and symmetric")
}

/// Kernel of the rescaled correlations `U^h` (`U^id = S^id / 2`, `U^h = S^h`
/// otherwise) under one proportionally coupled step: `E[U'] = K U`.
///
/// Coinciding targets accumulate. For an involutive generator `h` the
/// `h²` term vanishes since `h² = id` is already counted in the return to
/// the identity.
pub fn comparison_kernel(cayley: &Cayley) -> Result<TransitionKernel> {
    let (g, n, m) = (cayley.group(), cayley.order(), cayley.degree());
    let (nf, mn) = (n as f64, (m * n) as f64);
    let id = g.identity();
    let mut b = Builder::new(n);
    let four = |b: &mut Builder, h: usize, r: usize| {
        let ri = g.inv(r);
        for t in [g.mul(ri, h), g.mul(r, h), g.mul(h, r), g.mul(h, ri)] {
            b.add(h, t, 1.0 / (2.0 * mn));
        }
    };
    for h in 0..n {
        if h == id {
            b.add(h, h, 1.0 - 2.0 / (3.0 * nf));
            for r in cayley.gens().iter() {
                b.add(h, r, 2.0 / (3.0 * mn));
            }
        } else if cayley.gens().contains(h) {
            b.add(h, h, 1.0 - 2.0 / nf + 2.0 / (3.0 * mn));
            b.add(h, id, 4.0 / (3.0 * mn));
            let hh = g.mul(h, h);
            if hh != id {
                b.add(h, hh, 2.0 / mn);
            }
            let hi = g.inv(h);
            for r in cayley.gens().iter().filter(|&r| r != h && r != hi) {
                four(&mut b, h, r);
            }
        } else {
            b.add(h, h, 1.0 - 2.0 / nf);
            for r in cayley.gens().iter() {
                four(&mut b, h, r);
            }
        }
    }
    let mut pi = vec![1.0 / (nf + 1.0); n];
    pi[id] = 2.0 / (nf + 1.0);
    b.finish(pi)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralSummary {
    /// Sorted descending.
    pub eigenvalues: Vec<f64>,
    pub gap: f64,
}

/// Eigenvalues together with right eigenvectors of `P` (columns, in the
/// same order), normalized so `Σ π(a) v(a)² = 1`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub summary: SpectralSummary,
    pub vectors: DMatrix<f64>,
}

pub fn spectral_decomposition(k: &TransitionKernel) -> Result<SpectralDecomposition> {
    k.check_reversible()?;
    let n = k.n();
    let sq: Vec<f64> = k.pi().iter().map(|p| p.sqrt()).collect();
    let a = DMatrix::from_fn(n, n, |i, j| {
        0.5 * (sq[i] * k.p(i, j) / sq[j] + sq[j] * k.p(j, i) / sq[i])
    });
    let eig = SymmetricEigen::new(a);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |row, col| eig.eigenvectors[(row, order[col])] / sq[row]);
    let gap = if n > 1 { 1.0 - eigenvalues[1] } else { 1.0 };
    Ok(SpectralDecomposition {
        summary: SpectralSummary { eigenvalues, gap },
        vectors,
    })
}

/// Eigenvalues of the `π`-symmetrized kernel `D^{1/2} P D^{-1/2}`.
pub fn spectral_summary(k: &TransitionKernel) -> Result<SpectralSummary> {
    spectral_decomposition(k).map(|d| d.summary)
}

/// `E(φ) = ½ Σ_{a,b} π(a) P(a,b) (φ(a) − φ(b))²`.
pub fn dirichlet_form(k: &TransitionKernel, phi: &[f64]) -> f64 {
    assert_eq!(phi.len(), k.n());
    let mut total = 0.0;
    for a in 0..k.n() {
        let mut row = 0.0;
        for (b, &p) in k.row(a).iter().enumerate() {
            if p != 0.0 && a != b {
                let d = phi[a] - phi[b];
                row += p * d * d;
            }
        }
        total += k.pi()[a] * row;
    }
    0.5 * total
}

/// Outcome of comparing the comparison chain against the base walk.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub trials: usize,
    /// Smallest sampled `E(φ) / Ê(φ)`; must be at least 1/4.
    pub min_dirichlet_ratio: f64,
    /// Largest of `π/π̂` and `π̂/π`; must be at most 2.
    pub max_measure_ratio: f64,
    /// `γ` of the comparison kernel.
    pub gap: f64,
    /// `γ̂` of the base walk.
    pub base_gap: f64,
}

impl ComparisonReport {
    pub fn dirichlet_ok(&self) -> bool {
        self.min_dirichlet_ratio >= 0.25 - SPECTRAL_TOL
    }

    pub fn measure_ok(&self) -> bool {
        self.max_measure_ratio <= 2.0 + ALGEBRAIC_TOL
    }

    pub fn gap_ok(&self) -> bool {
        self.gap >= self.base_gap / 8.0 - SPECTRAL_TOL
    }
}

/// Computes the comparison quantities without judging them; `trials`
/// Gaussian test functions are drawn from independent per-trial streams.
pub fn comparison_report(cayley: &Cayley, trials: usize, seed: u64) -> Result<ComparisonReport> {
    let base = base_walk_kernel(cayley);
    let comp = comparison_kernel(cayley)?;
    let n = cayley.order();
    let min_dirichlet_ratio = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = replica_rng(seed, t as u64);
            let phi: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            dirichlet_form(&comp, &phi) / dirichlet_form(&base, &phi)
        })
        .reduce(|| f64::INFINITY, f64::min);
    let max_measure_ratio = comp
        .pi()
        .iter()
        .zip(base.pi())
        .map(|(a, b)| (a / b).max(b / a))
        .fold(0.0, f64::max);
    Ok(ComparisonReport {
        trials,
        min_dirichlet_ratio,
        max_measure_ratio,
        gap: spectral_summary(&comp)?.gap,
        base_gap: spectral_summary(&base)?.gap,
    })
}

/// [`comparison_report`] followed by the three inequality checks.
pub fn verify_comparison(cayley: &Cayley, trials: usize, seed: u64) -> Result<ComparisonReport> {
    let report = comparison_report(cayley, trials, seed)?;
    if !report.dirichlet_ok() {
        return Err(Error::ComparisonViolated(format!(
            "Dirichlet ratio {} < 1/4",
            report.min_dirichlet_ratio
        )));
    }
    if !report.measure_ok() {
        return Err(Error::ComparisonViolated(format!(
            "measure ratio {} > 2",
            report.max_measure_ratio
        )));
    }
    if !report.gap_ok() {
        return Err(Error::ComparisonViolated(format!(
            "gap {} < base gap {} / 8",
            report.gap, report.base_gap
        )));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_complete_cyclic, build_cyclic, build_dihedral, build_hypercube};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-14
    }

    fn suite() -> Vec<Cayley> {
        vec![
            build_cyclic(6, &[1, -1]).unwrap(),
            build_complete_cyclic(6).unwrap(),
            build_cyclic(12, &[1, -1]).unwrap(),
            build_hypercube(3).unwrap(),
            build_dihedral(3).unwrap(),
            build_dihedral(5).unwrap(),
        ]
    }

    #[test]
    fn base_walk_on_four_cycle() {
        let k = base_walk_kernel(&build_cyclic(4, &[1, 3]).unwrap());
        for z in 0..4 {
            assert!(close(k.p(z, z), 0.5));
            assert!(close(k.p(z, (z + 1) % 4), 0.25));
            assert!(close(k.p(z, (z + 3) % 4), 0.25));
            assert_eq!(k.p(z, (z + 2) % 4), 0.0);
        }
    }

    #[test]
    fn base_walk_on_complete_five() {
        let k = base_walk_kernel(&build_complete_cyclic(5).unwrap());
        for a in 0..5 {
            for b in 0..5 {
                let want = if a == b { 0.6 } else { 0.1 };
                assert!(close(k.p(a, b), want), "{a} {b} {}", k.p(a, b));
            }
        }
    }

    #[test]
    fn edge_walk_examples() {
        let k = edge_walk_kernel(&build_cyclic(4, &[1, 3]).unwrap());
        assert!(close(k.p(0, 0), 0.75));
        assert!(close(k.p(0, 1), 0.125));
        assert!(close(k.p(0, 3), 0.125));
        let k = edge_walk_kernel(&build_hypercube(1).unwrap());
        assert!((0..2).all(|a| (0..2).all(|b| close(k.p(a, b), 0.5))));
        let s = spectral_summary(&k).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-12 && s.eigenvalues[1].abs() < 1e-12);
        assert!((s.gap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn comparison_kernel_is_reversible_for_every_family() {
        for c in suite() {
            let k = comparison_kernel(&c).unwrap();
            let n = c.order() as f64;
            assert!(close(k.pi()[c.group().identity()], 2.0 / (n + 1.0)));
            assert!(k.detailed_balance_residual().2 < 1e-12);
        }
    }

    #[test]
    fn comparison_kernel_on_complete_set_has_no_non_generator_rows() {
        let c = build_complete_cyclic(5).unwrap();
        let k = comparison_kernel(&c).unwrap();
        // Every non-identity row returns to the identity at rate 4/(3mn).
        for h in 1..5 {
            assert!(close(k.p(h, 0), 4.0 / (3.0 * 20.0)));
        }
    }

    #[test]
    fn comparison_kernel_preserves_weighted_orthogonality() {
        for c in suite() {
            let k = comparison_kernel(&c).unwrap();
            let n = c.order();
            let w: Vec<f64> = (0..n).map(|a| if a == 0 { 2.0 } else { 1.0 }).collect();
            let mut v: Vec<f64> = (0..n).map(|a| ((a * 7 + 3) % 5) as f64 - 1.3).collect();
            let dot: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
            let norm: f64 = w.iter().map(|x| x * x).sum();
            for (x, wi) in v.iter_mut().zip(&w) {
                *x -= dot / norm * wi;
            }
            let pv = k.apply(&v);
            let out: f64 = pv.iter().zip(&w).map(|(a, b)| a * b).sum();
            assert!(out.abs() < 1e-10, "{out}");
        }
    }

    #[test]
    fn cycle_gap_closed_form() {
        for n in [4usize, 5, 9, 16] {
            let k = base_walk_kernel(&build_cyclic(n, &[1, -1]).unwrap());
            let want = (2.0 / n as f64) * (1.0 - (std::f64::consts::TAU / n as f64).cos());
            let s = spectral_summary(&k).unwrap();
            assert!((s.gap - want).abs() < 1e-10);
            assert!((s.eigenvalues[0] - 1.0).abs() < 1e-10);
            assert!(s.eigenvalues.iter().all(|&e| e >= -1e-10));
        }
        let k = base_walk_kernel(&build_cyclic(4, &[1, -1]).unwrap());
        assert!((spectral_summary(&k).unwrap().gap - 0.5).abs() < 1e-12);
    }

    #[test]
    fn complete_set_gap() {
        let k = base_walk_kernel(&build_complete_cyclic(5).unwrap());
        assert!((spectral_summary(&k).unwrap().gap - 0.5).abs() < 1e-12);
    }

    #[test]
    fn eigenvectors_are_right_eigenvectors() {
        let k = comparison_kernel(&build_dihedral(3).unwrap()).unwrap();
        let d = spectral_decomposition(&k).unwrap();
        for col in 0..k.n() {
            let v: Vec<f64> = d.vectors.column(col).iter().copied().collect();
            let pv = k.apply(&v);
            let lam = d.summary.eigenvalues[col];
            for (a, b) in pv.iter().zip(&v) {
                assert!((a - lam * b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn dirichlet_form_matches_brute_force_on_four_cycle() {
        let k = base_walk_kernel(&build_cyclic(4, &[1, 3]).unwrap());
        let phi = [1.0, 0.0, 0.0, 0.0];
        // Brute force: pairs (0,1),(1,0),(0,3),(3,0) each contribute
        // (1/4)(1/4)(1)^2; half the total is 1/8.
        let mut brute = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                brute += 0.25 * k.p(a, b) * (phi[a] - phi[b]) * (phi[a] - phi[b]);
            }
        }
        brute *= 0.5;
        assert!(close(dirichlet_form(&k, &phi), brute));
        assert!(close(brute, 0.125));
        assert_eq!(dirichlet_form(&k, &[3.0; 4]), 0.0);
        let scaled: Vec<f64> = phi.iter().map(|x| 2.5 * x).collect();
        assert!(close(dirichlet_form(&k, &scaled), 6.25 * 0.125));
    }

    #[test]
    fn comparison_checks_pass() {
        let r = verify_comparison(&build_cyclic(8, &[1, -1]).unwrap(), 1000, 7).unwrap();
        assert!(r.min_dirichlet_ratio >= 0.25);
        assert!((r.max_measure_ratio - 16.0 / 9.0).abs() < 1e-12);
        verify_comparison(&build_hypercube(3).unwrap(), 200, 1).unwrap();
    }

    #[test]
    fn csv_round_trips_bits() {
        let k = comparison_kernel(&build_cyclic(5, &[1, -1]).unwrap()).unwrap();
        let csv = k.to_csv();
        let parsed: Vec<f64> = csv
            .lines()
            .flat_map(|l| l.split(',').map(|x| x.parse::<f64>().unwrap()).collect::<Vec<_>>())
            .collect();
        for a in 0..5 {
            for b in 0..5 {
                assert_eq!(parsed[a * 5 + b].to_bits(), k.p(a, b).to_bits());
            }
        }
    }

    #[test]
    fn rejects_non_stochastic_and_irreversible() {
        assert!(matches!(
            TransitionKernel::new(2, vec![0.5, 0.6, 0.5, 0.5], vec![0.5, 0.5]),
            Err(Error::NonStochasticRow { row: 0, .. })
        ));
        assert!(matches!(
            TransitionKernel::new(2, vec![0.5, 0.5, 0.1, 0.9], vec![0.5, 0.5]),
            Err(Error::NotReversible { .. })
        ));
    }
}
