//! Coupon-collector lower bound: after too few updates some row of the
//! matrix chain has never been touched.

use rayon::prelude::*;
use serde::Serialize;

use crate::matrix::draw_pair;
use crate::rng::replica_rng;
use crate::stats::proportion_se;

#[derive(Debug, Clone, Serialize)]
pub struct CouponReport {
    pub n: usize,
    pub c: f64,
    /// `max(0, ⌊½ n (ln n − c)⌋)`.
    pub t: usize,
    pub replicas: usize,
    /// Fraction of replicas with some row never updated by time `t`.
    pub miss_probability: f64,
    pub std_error: f64,
    /// `1 − exp(−e^c)`.
    pub target: f64,
}

pub fn coupon_horizon(n: usize, c: f64) -> usize {
    let nf = n as f64;
    (0.5 * nf * (nf.ln() - c)).floor().max(0.0) as usize
}

pub fn coupon_collector_experiment(n: usize, c: f64, replicas: usize, seed: u64) -> CouponReport {
    let t = coupon_horizon(n, c);
    let misses = (0..replicas)
        .into_par_iter()
        .filter(|&rep| {
            let mut rng = replica_rng(seed, rep as u64);
            let mut touched = vec![false; n];
            let mut left = n;
            for _ in 0..t {
                let (i, j) = draw_pair(n, &mut rng);
                for a in [i, j] {
                    if !touched[a] {
                        touched[a] = true;
                        left -= 1;
                    }
                }
                if left == 0 {
                    return false;
                }
            }
            left > 0
        })
        .count();
    let p = misses as f64 / replicas.max(1) as f64;
    CouponReport {
        n,
        c,
        t,
        replicas,
        miss_probability: p,
        std_error: proportion_se(p, replicas.max(1)),
        target: 1.0 - (-c.exp()).exp(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_horizon_always_misses() {
        let r = coupon_collector_experiment(50, 10.0, 100, 1);
        assert_eq!(r.t, 0);
        assert_eq!(r.miss_probability, 1.0);
    }

    #[test]
    fn large_c_almost_always_misses() {
        let r = coupon_collector_experiment(200, 3.0, 2000, 2);
        assert!(r.miss_probability >= 0.99, "{r:?}");
    }
}
