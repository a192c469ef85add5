//! Property tests for the structural invariants.

use std::collections::BTreeSet;

use gibbs_coupling::coupling::{
    closeness_check, run_nonmarkovian_coupling, CayleyPairs, PartitionProcess, RunOptions,
    UniformPairs, UpdateSchedule,
};
use gibbs_coupling::group::{build_cyclic, build_dihedral, build_hypercube, format_group, parse_group};
use gibbs_coupling::matrix::{contraction_identity_check, msample_stationary, MatrixState};
use gibbs_coupling::rng::seeded;
use gibbs_coupling::simplex::{s_vector, sample_stationary, split_pair};
use proptest::prelude::*;
use rand::Rng;

/// Components of the graph with edges `pairs[t..]`, blocks sorted and ordered
/// by smallest element.
fn components(n: usize, pairs: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in pairs {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut block = vec![s];
        seen[s] = true;
        let mut k = 0;
        while k < block.len() {
            for &b in &adj[block[k]] {
                if !seen[b] {
                    seen[b] = true;
                    block.push(b);
                }
            }
            k += 1;
        }
        block.sort_unstable();
        out.push(block);
    }
    out
}

fn schedule() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (2usize..=32).prop_flat_map(|n| {
        let pair = (0..n, 1..n).prop_map(move |(a, d)| (a, (a + d) % n));
        (Just(n), prop::collection::vec(pair, 1..200))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn partition_process_matches_components((n, pairs) in schedule()) {
        let sched = UpdateSchedule::new(0, pairs.clone()).unwrap();
        let p = PartitionProcess::build(&sched, n);
        let end = pairs.len();
        let tau_oracle = (0..=end).rev().find(|&t| components(n, &pairs[t..]).len() == 1).map(|t| end - t);
        prop_assert_eq!(p.tau, tau_oracle);
        let cut = end - p.tau.unwrap_or(end);
        for t in cut..=end {
            prop_assert_eq!(p.partition_at(t), components(n, &pairs[t..]));
        }
        let marked: BTreeSet<usize> = p.marked.iter().map(|m| m.t).collect();
        for t in cut..end {
            let (now, next) = (components(n, &pairs[t..]), components(n, &pairs[t + 1..]));
            // Nesting: every block of P_{t+1} lies inside a block of P_t.
            for b in &next {
                prop_assert!(now.iter().any(|a| b.iter().all(|x| a.contains(x))));
            }
            prop_assert_eq!(now != next, marked.contains(&t));
            if now != next {
                prop_assert_eq!(now.len() + 1, next.len());
            }
        }
        for m in &p.marked {
            let next = components(n, &pairs[m.t + 1..]);
            prop_assert!(next.contains(&m.s1) && next.contains(&m.s2));
            prop_assert!(m.s1.len() <= m.s2.len());
            if m.s1.len() == m.s2.len() {
                prop_assert!(m.s1[0] < m.s2[0]);
            }
            let (a, b) = pairs[m.t];
            prop_assert!(m.s1.contains(&a) != m.s1.contains(&b));
        }
    }

    #[test]
    fn group_file_round_trip(n in 1usize..40, r in 1i64..40) {
        prop_assume!(r % n as i64 != 0);
        let c = build_cyclic(n, &[r, -r]);
        if let Ok(c) = c {
            prop_assert_eq!(parse_group(&format_group(&c)).unwrap(), c);
        }
    }

    #[test]
    fn simplex_moves_preserve_mass(seed in any::<u64>(), n in 2usize..40, steps in 1usize..500) {
        let mut rng = seeded(seed);
        let mut x = sample_stationary(n, &mut rng).into_vec();
        for _ in 0..steps {
            let a = rng.random_range(0..n);
            let b = (a + rng.random_range(1..n)) % n;
            let s = x[a] + x[b];
            split_pair(&mut x, a, b, rng.random());
            prop_assert!(x[a] >= 0.0 && x[b] >= 0.0);
            prop_assert_eq!(x[a] + x[b], s);
        }
        prop_assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn s_vector_invariants(seed in any::<u64>(), which in 0usize..3) {
        let c = match which {
            0 => build_cyclic(9, &[1, -1]).unwrap(),
            1 => build_dihedral(4).unwrap(),
            _ => build_hypercube(3).unwrap(),
        };
        let n = c.order();
        let mut rng = seeded(seed);
        let x = sample_stationary(n, &mut rng);
        let y = sample_stationary(n, &mut rng);
        let s = s_vector(x.as_slice(), y.as_slice(), c.group());
        prop_assert!(s.zero_sum_residual() < 1e-14);
        prop_assert!(s.cauchy_schwarz_holds(1e-15));
        let d2: f64 = x.as_slice().iter().zip(y.as_slice()).map(|(a, b)| (a - b).powi(2)).sum();
        prop_assert!((s.s[c.group().identity()] - d2).abs() < 1e-15);
    }

    #[test]
    fn matrix_moves_stay_in_polytope(seed in any::<u64>(), n in 3usize..30, steps in 1usize..500) {
        let mut rng = seeded(seed);
        let mut x = msample_stationary(n, &mut rng).unwrap();
        for _ in 0..steps {
            let i = rng.random_range(0..n);
            let j = (i + rng.random_range(1..n)) % n;
            x.apply(i, j, rng.random());
        }
        prop_assert!(x.min_entry() >= 0.0 && x.max_entry() <= 2.0);
        prop_assert!((x.as_slice().iter().sum::<f64>() - n as f64).abs() < 1e-9);
        prop_assert!(MatrixState::new(x.into_vec()).is_ok());
    }

    #[test]
    fn matrix_identity_holds(seed in any::<u64>(), n in 3usize..40) {
        let mut rng = seeded(seed);
        let x = msample_stationary(n, &mut rng).unwrap();
        let y = msample_stationary(n, &mut rng).unwrap();
        let r = contraction_identity_check(&x, &y);
        prop_assert!(r.residual <= 1e-10 * r.rhs.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn closeness_holds_on_traced_runs(seed in any::<u64>(), forced in prop::option::of(0usize..4)) {
        let c = build_cyclic(8, &[1, -1]).unwrap();
        let mut opts = RunOptions::new(200, 400, 4, seed);
        opts.trace = true;
        opts.force_failure = forced;
        let res = run_nonmarkovian_coupling(
            &CayleyPairs { cayley: &c },
            &sample_stationary(8, &mut seeded(seed ^ 1)),
            |rng| Ok(sample_stationary(8, rng)),
            &opts,
        ).unwrap();
        for t in &res.traces {
            prop_assert!(closeness_check(t).ok);
        }
        if forced.is_none() {
            prop_assert!(res.final_coupling_holds(1e-8));
        }

        let mut opts = RunOptions::new(100, 300, 4, seed);
        opts.trace = true;
        let res = run_nonmarkovian_coupling(
            &UniformPairs { n: 8 },
            &MatrixState::extreme(8),
            |rng| msample_stationary(8, rng),
            &opts,
        ).unwrap();
        for t in &res.traces {
            prop_assert!(closeness_check(t).ok);
        }
    }
}
