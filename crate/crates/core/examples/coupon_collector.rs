//! Probability that some column pair is never touched by time
//! `½ n (ln n - c)`, against `1 - exp(-e^c)`.

use gibbs_coupling::harness::coupon_collector_experiment;

fn main() {
    for c in [-1.0, 0.0, 1.0, 3.0] {
        let r = coupon_collector_experiment(200, c, 10_000, 1);
        println!(
            "c = {c:>4}: T = {:>4}  miss {:.4} ± {:.4}  limit {:.4}",
            r.t, r.miss_probability, r.std_error, r.target
        );
    }
}
