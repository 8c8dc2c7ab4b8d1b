//! Generative models for skewed citation data, and the statistics used to
//! check them: cumulative advantage, power-law tail fitting, skewness, and
//! a two-community citation fixture.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{map_indices, Schedule};
use crate::ingest::{aggregate, CitationRecord, CitationTensor};
use crate::rng::XorShift64Star;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CumAdvConfig {
    pub n_steps: u64,
    pub n_seed: usize,
    /// Probability that an event picks its target uniformly; otherwise the
    /// target is drawn in proportion to current citation counts.
    pub alpha: f64,
    /// Probability that a uniform event founds a new journal instead.
    pub new_target_prob: f64,
    pub seed: u64,
}

impl CumAdvConfig {
    fn validate(&self) -> Result<()> {
        let prob = |name: &str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::Parameter(format!("{name} must be in [0, 1], got {p}")))
            }
        };
        prob("alpha", self.alpha)?;
        prob("new_target_prob", self.new_target_prob)?;
        if self.n_steps == 0 || self.n_seed == 0 {
            return Err(Error::Parameter("n_steps and n_seed must be at least 1".into()));
        }
        Ok(())
    }
}

/// Price-style cumulative advantage process.
///
/// Starts from `n_seed` journals holding one citation each. Every step
/// draws `u`; if `u < alpha` it draws `v` and either founds a new journal
/// with one citation (`v < new_target_prob`) or cites a uniformly chosen
/// journal, otherwise it cites the owner of a uniformly chosen earlier
/// citation, which is proportional to current counts. Returns counts in
/// journal creation order; they always sum to `n_steps + n_seed`.
pub fn simulate_cumulative_advantage(config: &CumAdvConfig) -> Result<Vec<u64>> {
    config.validate()?;
    let mut rng = XorShift64Star::new(config.seed);
    let mut counts = vec![1u64; config.n_seed];
    let total = config.n_seed + config.n_steps as usize;
    let mut owners: Vec<u32> = Vec::with_capacity(total);
    owners.extend(0..config.n_seed as u32);
    for _ in 0..config.n_steps {
        let target = if rng.next_f64() < config.alpha {
            if rng.next_f64() < config.new_target_prob {
                counts.push(0);
                counts.len() - 1
            } else {
                rng.below(counts.len() as u64) as usize
            }
        } else {
            owners[rng.below(owners.len() as u64) as usize] as usize
        };
        counts[target] += 1;
        owners.push(target as u32);
    }
    Ok(counts)
}

/// Runs `f(base_seed + i)` for `i in 0..n`, results in replication order.
pub fn replicate<T, F>(n: usize, base_seed: u64, schedule: Schedule, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    map_indices(n, schedule, |i| f(base_seed.wrapping_add(i as u64)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub xmin: u64,
    pub n_tail: usize,
}

/// Continuous-approximation maximum-likelihood exponent for the tail
/// `x >= xmin`: `1 + n / Σ ln(x / (xmin − 1/2))`.
///
/// The half-unit offset approximates the discrete likelihood; it is biased
/// for small `xmin` (a few units) and accurate well into the tail.
pub fn fit_power_law(counts: &[u64], xmin: u64) -> Result<PowerLawFit> {
    if xmin == 0 {
        return Err(Error::Parameter("xmin must be at least 1".into()));
    }
    let mut tail: Vec<u64> = counts.iter().copied().filter(|&x| x >= xmin).collect();
    if tail.len() < 2 {
        return Err(Error::InsufficientData(format!("{} value(s) >= xmin={xmin}, need 2", tail.len())));
    }
    if tail.iter().all(|&x| x == tail[0]) {
        return Err(Error::DivergentExponent);
    }
    // summation order fixed so the estimate does not depend on input order
    tail.sort_unstable();
    let offset = xmin as f64 - 0.5;
    let log_sum: f64 = tail.iter().map(|&x| (x as f64 / offset).ln()).sum();
    Ok(PowerLawFit { exponent: 1.0 + tail.len() as f64 / log_sum, xmin, n_tail: tail.len() })
}

/// Adjusted Fisher–Pearson skewness `G1 = sqrt(n(n−1))/(n−2) · m3 / m2^1.5`.
pub fn sample_skewness(values: &[f64]) -> Result<f64> {
    let n = values.len();
    if n < 3 {
        return Err(Error::InsufficientData(format!("skewness needs 3 values, got {n}")));
    }
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let (mut m2, mut m3) = (0.0, 0.0);
    for &x in values {
        let d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= nf;
    m3 /= nf;
    if m2 == 0.0 {
        return Err(Error::UndefinedSkewness);
    }
    Ok((nf * (nf - 1.0)).sqrt() / (nf - 2.0) * m3 / m2.powf(1.5))
}

pub const FIXTURE_EGO: &str = "EGO";

/// Two (or more) journal communities around an ego journal.
///
/// Block `b` holds journals named `A01`, `A02`, … (`B01`, … for the next
/// block). Within a block, journal `i` cites journal `j` about
/// `base_rate · a_j` times, where the attractiveness `a_j` falls
/// geometrically from 10 to 1 across the block; across blocks the mean is
/// scaled by `inter_block_rate`. The ego cites every journal at
/// `base_rate · a_j` and is cited by (and cites itself) at
/// `base_rate · sqrt(10)`. Counts are Poisson draws in row-major order over
/// `EGO, A01…, B01…`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixtureConfig {
    pub blocks: usize,
    pub block_size: usize,
    pub inter_block_rate: f64,
    pub base_rate: f64,
    pub year: i32,
    pub seed: u64,
}

impl Default for FixtureConfig {
    fn default() -> Self {
        Self { blocks: 2, block_size: 10, inter_block_rate: 0.05, base_rate: 100.0, year: 1994, seed: 42 }
    }
}

impl FixtureConfig {
    pub fn journal_names(&self) -> Vec<String> {
        let mut names = vec![FIXTURE_EGO.to_string()];
        for b in 0..self.blocks {
            let letter = (b'A' + b as u8) as char;
            names.extend((1..=self.block_size).map(|i| format!("{letter}{i:02}")));
        }
        names
    }

    /// Block index of a fixture journal; `None` for the ego.
    pub fn block_of(name: &str) -> Option<usize> {
        let first = name.bytes().next()?;
        (name != FIXTURE_EGO && first.is_ascii_uppercase()).then(|| (first - b'A') as usize)
    }
}

pub fn synthesize_environment_fixture(config: &FixtureConfig) -> Result<CitationTensor> {
    if !(0.0..=1.0).contains(&config.inter_block_rate) {
        return Err(Error::Parameter(format!("inter_block_rate must be in [0, 1], got {}", config.inter_block_rate)));
    }
    if config.blocks == 0 || config.blocks > 26 || config.block_size == 0 || !(config.base_rate > 0.0) {
        return Err(Error::Parameter("fixture needs 1..=26 non-empty blocks and a positive base rate".into()));
    }
    let m = config.block_size;
    let attractiveness: Vec<f64> =
        (0..m).map(|j| if m == 1 { 1.0 } else { 10f64.powf(1.0 - j as f64 / (m - 1) as f64) }).collect();
    let hub = config.base_rate * 10f64.sqrt();
    let names = config.journal_names();
    // (block, attractiveness) per journal; the ego is None
    let meta: Vec<Option<(usize, f64)>> = std::iter::once(None)
        .chain((0..config.blocks).flat_map(|b| attractiveness.iter().map(move |&a| Some((b, a)))))
        .collect();

    let mut rng = XorShift64Star::new(config.seed);
    let mut records = Vec::new();
    for (i, citing) in names.iter().enumerate() {
        for (j, cited) in names.iter().enumerate() {
            let mean = match (meta[i], meta[j]) {
                (None, Some((_, a))) => config.base_rate * a,
                (_, None) => hub,
                (Some((bi, _)), Some((bj, a))) => {
                    let w = if bi == bj { 1.0 } else { config.inter_block_rate };
                    config.base_rate * a * w
                }
            };
            let count = rng.poisson(mean);
            if count > 0 {
                records.push(CitationRecord { year: config.year, citing: citing.clone(), cited: cited.clone(), count });
            }
        }
    }
    Ok(aggregate(records))
}
