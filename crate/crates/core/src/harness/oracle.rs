//! Brute-force reference values, computed without the chain code they are
//! used to check.

use serde::Serialize;

use crate::group::Cayley;
use crate::stats::irwin_hall_cdf;

pub const SUITES: [&str; 4] = [
    "kernel-enumeration",
    "acceptance-rate",
    "schedule-enumeration",
    "marginal-density",
];

/// Base-walk transition matrix by enumerating every equally likely
/// `(g, r)` draw and following where a single marker at `z` ends up.
pub fn kernel_enumeration(cayley: &Cayley) -> Vec<Vec<f64>> {
    let (g, n, m) = (cayley.group(), cayley.order(), cayley.degree());
    let w = 1.0 / (n * m) as f64;
    let mut p = vec![vec![0.0; n]; n];
    for (z, row) in p.iter_mut().enumerate() {
        for a in 0..n {
            for r in cayley.gens().iter() {
                let b = g.mul(a, r);
                let to = if z == a {
                    b
                } else if z == b {
                    a
                } else {
                    z
                };
                row[to] += w;
            }
        }
    }
    p
}

/// `P[n−2 ≤ Σ_{n−1} U[0,2] ≤ n]`, exactly.
pub fn acceptance_rate(n: usize) -> f64 {
    if n == 3 {
        // Triangular density of U1 + U2 on [0, 4]; the rejected tails
        // [0, 1) and (3, 4] each carry 1/8.
        return 1.0 - 2.0 * 0.125;
    }
    let k = n - 1;
    irwin_hall_cdf(k, n as f64 / 2.0) - irwin_hall_cdf(k, (n as f64 - 2.0) / 2.0)
}

fn connects(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::from([0]);
    seen[0] = true;
    while let Some(a) = queue.pop_front() {
        for &b in &adj[a] {
            if !seen[b] {
                seen[b] = true;
                queue.push_back(b);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Exact `P[τ ≤ len]` for uniformly drawn unordered pairs on `n`
/// coordinates, by enumerating all `C(n,2)^len` sequences.
pub fn schedule_enumeration(n: usize, len: usize) -> f64 {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
        .collect();
    let q = pairs.len();
    let total = q.pow(len as u32);
    let mut hits = 0usize;
    let mut seq = Vec::with_capacity(len);
    for code in 0..total {
        seq.clear();
        let mut c = code;
        for _ in 0..len {
            seq.push(pairs[c % q]);
            c /= q;
        }
        if connects(n, &seq) {
            hits += 1;
        }
    }
    hits as f64 / total as f64
}

#[derive(Debug, Clone, Serialize)]
pub struct MarginalPoint {
    pub u: f64,
    /// Unnormalized density of `c[0]` at `u`.
    pub density: f64,
}

/// Unnormalized density of `c[0]` for the uniform law on narrow matrices:
/// the probability that the other `n − 1` rows can absorb `n − u`.
pub fn marginal_density(n: usize, points: usize) -> Vec<MarginalPoint> {
    let k = n - 2;
    let nf = n as f64;
    (0..points)
        .map(|p| {
            let u = 2.0 * p as f64 / (points - 1).max(1) as f64;
            let density = irwin_hall_cdf(k, (nf - u) / 2.0) - irwin_hall_cdf(k, (nf - 2.0 - u) / 2.0);
            MarginalPoint { u, density }
        })
        .collect()
}

/// 12 significant digits.
pub fn fmt12(x: f64) -> String {
    format!("{x:.11e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::build_cyclic;

    #[test]
    fn four_cycle_row() {
        let p = kernel_enumeration(&build_cyclic(4, &[1, 3]).unwrap());
        assert_eq!(p[0], vec![0.5, 0.25, 0.0, 0.25]);
    }

    #[test]
    fn three_row_acceptance() {
        assert_eq!(acceptance_rate(3), 0.75);
        let k = 2;
        let general = irwin_hall_cdf(k, 1.5) - irwin_hall_cdf(k, 0.5);
        assert!((general - 0.75).abs() < 1e-15);
    }

    #[test]
    fn three_coordinate_schedules() {
        for len in 1..=6 {
            let want = if len == 1 { 0.0 } else { 1.0 - 3f64.powi(1 - len as i32) };
            assert!((schedule_enumeration(3, len) - want).abs() < 1e-15);
        }
        assert!((schedule_enumeration(3, 4) - 26.0 / 27.0).abs() < 1e-15);
    }

    #[test]
    fn marginal_density_three_rows() {
        // For n = 3 the unnormalized density is (1 + min(u, 2 − u)) / 2.
        let pts = marginal_density(3, 5);
        let got: Vec<f64> = pts.iter().map(|p| p.density).collect();
        assert_eq!(got, vec![0.5, 0.75, 1.0, 0.75, 0.5]);
    }

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt12(0.75), "7.50000000000e-1");
    }
}
