//! Reference implementations that share no code with the library.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Cumulative advantage process on a second generator. Same event rules as
/// the library, different random stream.
pub fn cumulative_advantage(n_steps: u64, n_seed: usize, alpha: f64, ntp: f64, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![1u64; n_seed];
    let mut owners: Vec<usize> = (0..n_seed).collect();
    for _ in 0..n_steps {
        let target = if rng.random::<f64>() < alpha {
            if rng.random::<f64>() < ntp {
                counts.push(0);
                counts.len() - 1
            } else {
                rng.random_range(0..counts.len())
            }
        } else {
            owners[rng.random_range(0..owners.len())]
        };
        counts[target] += 1;
        owners.push(target);
    }
    counts
}

/// Tail exponent from a least-squares line through the log-log empirical
/// complementary CDF at every distinct value `>= xmin`.
pub fn ccdf_regression_exponent(counts: &[u64], xmin: u64) -> f64 {
    let mut tail: Vec<u64> = counts.iter().copied().filter(|&x| x >= xmin).collect();
    tail.sort_unstable();
    let n = tail.len() as f64;
    let mut pts = Vec::new();
    let mut i = 0;
    while i < tail.len() {
        let x = tail[i];
        pts.push(((x as f64).ln(), ((tail.len() - i) as f64 / n).ln()));
        while i < tail.len() && tail[i] == x {
            i += 1;
        }
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    1.0 - sxy / sxx
}

/// Hurwitz zeta `Σ_{k>=0} (k + q)^-s` by direct summation plus an
/// Euler–Maclaurin tail.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    const N: usize = 64;
    let mut sum = 0.0;
    for k in 0..N {
        sum += (k as f64 + q).powf(-s);
    }
    let a = N as f64 + q;
    sum + a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s) + s * a.powf(-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * a.powf(-s - 3.0) / 720.0
}

/// Discrete power law `P(x) = x^-s / ζ(s)`, `x >= 1`, by inverse CDF.
pub struct ZetaSampler {
    s: f64,
    zeta: f64,
    /// cdf[x-1] = P(X <= x) for x up to the table size
    cdf: Vec<f64>,
}

impl ZetaSampler {
    pub fn new(s: f64, table: usize) -> Self {
        let zeta = hurwitz_zeta(s, 1.0);
        let mut cdf = Vec::with_capacity(table);
        let mut acc = 0.0;
        for x in 1..=table {
            acc += (x as f64).powf(-s) / zeta;
            cdf.push(acc);
        }
        Self { s, zeta, cdf }
    }

    pub fn pmf(&self, x: u64) -> f64 {
        (x as f64).powf(-self.s) / self.zeta
    }

    fn survival(&self, x: u64) -> f64 {
        // P(X >= x)
        hurwitz_zeta(self.s, x as f64) / self.zeta
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> u64 {
        let u: f64 = rng.random();
        if u <= *self.cdf.last().unwrap() {
            return self.cdf.partition_point(|&c| c < u) as u64 + 1;
        }
        // beyond the table: bisect on the survival function
        let target = 1.0 - u;
        let (mut lo, mut hi) = (self.cdf.len() as u64, self.cdf.len() as u64 * 2);
        while self.survival(hi + 1) > target {
            lo = hi;
            hi *= 2;
        }
        // smallest x with P(X >= x + 1) <= target
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.survival(mid + 1) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

/// Pool-adjacent-violators replaced by exhaustive search over every split
/// of the sequence into contiguous blocks with non-decreasing means.
pub fn brute_force_isotonic(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u32..(1 << n.saturating_sub(1)) {
        let mut fit = Vec::with_capacity(n);
        let mut start = 0;
        let mut prev = f64::NEG_INFINITY;
        let mut ok = true;
        for end in 1..=n {
            if end == n || mask & (1 << (end - 1)) != 0 {
                let mean = y[start..end].iter().sum::<f64>() / (end - start) as f64;
                if mean < prev - 1e-12 {
                    ok = false;
                    break;
                }
                prev = mean;
                fit.extend(std::iter::repeat_n(mean, end - start));
                start = end;
            }
        }
        if !ok {
            continue;
        }
        let sse: f64 = y.iter().zip(&fit).map(|(a, b)| (a - b).powi(2)).sum();
        if best.as_ref().is_none_or(|(b, _)| sse < *b - 1e-12) {
            best = Some((sse, fit));
        }
    }
    best.map(|(_, f)| f).unwrap_or_default()
}

/// Raw varimax criterion, written out independently.
pub fn varimax_value(l: &[Vec<f64>]) -> f64 {
    let n = l.len() as f64;
    let k = l[0].len();
    (0..k)
        .map(|f| {
            let m2 = l.iter().map(|r| r[f].powi(2)).sum::<f64>() / n;
            let m4 = l.iter().map(|r| r[f].powi(4)).sum::<f64>() / n;
            m4 - m2 * m2
        })
        .sum()
}

/// Best varimax value over planar rotations of a two-column loading
/// matrix: 0.001 rad grid on [0, π/2) then golden-section refinement.
pub fn varimax_grid_search(l: &[Vec<f64>]) -> f64 {
    let v = |t: f64| {
        let (s, c) = t.sin_cos();
        let r: Vec<Vec<f64>> = l.iter().map(|x| vec![c * x[0] - s * x[1], s * x[0] + c * x[1]]).collect();
        varimax_value(&r)
    };
    let step = 1e-3;
    let steps = (std::f64::consts::FRAC_PI_2 / step).ceil() as usize;
    let (mut best_t, mut best_v) = (0.0, v(0.0));
    for i in 1..steps {
        let t = i as f64 * step;
        let val = v(t);
        if val > best_v {
            best_t = t;
            best_v = val;
        }
    }
    let (mut a, mut b) = (best_t - step, best_t + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if v(c) > v(d) {
            b = d;
        } else {
            a = c;
        }
    }
    best_v.max(v((a + b) / 2.0))
}
