//! Small statistics helpers shared by the experiments: running moments,
//! one-sample Kolmogorov–Smirnov tests and least-squares slopes.

use serde::Serialize;

/// Welford running mean / variance.
#[derive(Debug, Clone, Copy, Default)]
pub struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Chan et al. parallel merge.
    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let total = self.count + other.count;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / total as f64;
        self.m2 += other.m2 + delta * delta * (self.count as f64 * other.count as f64) / total as f64;
        self.count = total;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

impl FromIterator<f64> for Moments {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = Moments::new();
        for x in iter {
            m.push(x);
        }
        m
    }
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub samples: usize,
}

/// One-sample KS test of `samples` against the continuous CDF `cdf`.
pub fn ks_test<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> KsResult {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len();
    let nf = n as f64;
    let mut d = 0.0f64;
    for (k, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - k as f64 / nf).max((k + 1) as f64 / nf - f);
    }
    KsResult {
        statistic: d,
        p_value: kolmogorov_p_value(d, n),
        samples: n,
    }
}

pub fn ks_uniform(samples: &[f64]) -> KsResult {
    ks_test(samples, |x| x.clamp(0.0, 1.0))
}

/// Asymptotic Kolmogorov tail with Stephens' small-sample correction.
pub fn kolmogorov_p_value(d: f64, n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let sqrt_n = (n as f64).sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=200 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Ordinary least-squares slope of `ys` on `xs`.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Ratio estimator `Σa / Σb` with its delta-method standard error.
pub fn ratio_with_se(a: &[f64], b: &[f64]) -> (f64, f64) {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let sa: f64 = a.iter().sum();
    let sb: f64 = b.iter().sum();
    let ratio = sa / sb;
    let mean_b = sb / n;
    let resid: Moments = a.iter().zip(b).map(|(x, y)| x - ratio * y).collect();
    let se = (resid.variance() / n).sqrt() / mean_b;
    (ratio, se)
}

/// Binomial standard error of an observed frequency.
pub fn proportion_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Neumaier-compensated sum.
pub fn compensated_sum(xs: &[f64]) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// CDF of the sum of `k` independent uniforms on `[0, 1]`, by the
/// alternating closed form. Loses precision for `k` beyond about 20.
pub fn irwin_hall_cdf(k: usize, x: f64) -> f64 {
    if x <= 0.0 {
        return if k == 0 && x == 0.0 { 1.0 } else { 0.0 };
    }
    if x >= k as f64 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut binom = 1.0;
    for j in 0..=(x.floor() as usize).min(k) {
        if j > 0 {
            binom *= (k + 1 - j) as f64 / j as f64;
        }
        let term = binom * (x - j as f64).powi(k as i32);
        sum += if j % 2 == 0 { term } else { -term };
    }
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    (sum / fact).clamp(0.0, 1.0)
}

/// `count` evenly spaced times in `0..=horizon`, always including both
/// ends and deduplicated.
pub fn checkpoint_times(horizon: usize, count: usize) -> Vec<usize> {
    if count <= 1 || horizon == 0 {
        return if horizon == 0 { vec![0] } else { vec![0, horizon] };
    }
    let mut times: Vec<usize> = (0..count)
        .map(|k| ((k as f64) * horizon as f64 / (count - 1) as f64).round() as usize)
        .collect();
    times.dedup();
    times
}
