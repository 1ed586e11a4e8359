//! Seeded, shard-parallel Monte Carlo estimates of avoidance probabilities.
//!
//! A run is split into `shards` independent streams; shard `i` draws from
//! `SamplerState::child(seed, i)` and takes `samples / shards` draws (the first
//! `samples % shards` shards take one more). Hit counts are summed, so the
//! result depends on `(seed, samples, shards)` only, never on thread count.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mallows::{MallowsParam, SamplerState};
use crate::perm::{enumerate, Pattern, Permutation, MAX_ENUMERATE_N};

/// Fewer hits than this marks an estimate as unreliable.
pub const RARE_HIT_THRESHOLD: u64 = 10;

pub const DEFAULT_SHARDS: usize = 16;

pub const MAX_DISTRIBUTION_CHECK_N: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub shards: usize,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            seed,
            shards: DEFAULT_SHARDS,
        }
    }

    pub fn with_shards(mut self, shards: usize) -> Self {
        self.shards = shards;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Domain("samples must be >= 1".into()));
        }
        if self.shards == 0 {
            return Err(Error::Domain("shards must be >= 1".into()));
        }
        Ok(())
    }

    fn shard_sizes(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        let k = self.shards as u64;
        let (base, rem) = (self.samples / k, self.samples % k);
        (0..k).map(move |i| (i, base + u64::from(i < rem)))
    }
}

/// Binomial proportion estimate with a normal-approximation 95% interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    pub hits: u64,
    pub seed: u64,
    pub ci95: (f64, f64),
    pub flagged_rare: bool,
}

impl Estimate {
    pub fn from_counts(hits: u64, samples: u64, seed: u64) -> Self {
        let mean = hits as f64 / samples as f64;
        let stderr = (mean * (1.0 - mean) / samples as f64).sqrt();
        Self {
            mean,
            stderr,
            samples,
            hits,
            seed,
            ci95: (
                (mean - 1.96 * stderr).max(0.0),
                (mean + 1.96 * stderr).min(1.0),
            ),
            flagged_rare: hits < RARE_HIT_THRESHOLD,
        }
    }

    pub fn ci_contains(&self, p: f64) -> bool {
        self.ci95.0 <= p && p <= self.ci95.1
    }
}

/// Fraction of sampled Mallows(q) permutations of `[n]` avoiding `pattern`.
/// Any positive `q` is accepted (see [`MallowsParam`]).
pub fn estimate_avoidance(n: usize, q: f64, pattern: &Pattern, cfg: &McConfig) -> Result<Estimate> {
    cfg.validate()?;
    let param = MallowsParam::new(q)?;
    let hits: u64 = cfg
        .shard_sizes()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(i, size)| {
            let mut st = SamplerState::child(cfg.seed, i);
            (0..size)
                .filter(|_| param.sample(n, &mut st).avoids(pattern))
                .count() as u64
        })
        .sum();
    Ok(Estimate::from_counts(hits, cfg.samples, cfg.seed))
}

/// Index of a permutation in the lexicographic order of `S_n`.
fn lex_rank(p: &Permutation) -> usize {
    let w = p.as_slice();
    let n = w.len();
    let mut rank = 0usize;
    for i in 0..n {
        let smaller_after = w[i + 1..].iter().filter(|&&v| v < w[i]).count();
        rank = rank * (n - i) + smaller_after;
    }
    rank
}

/// Total-variation distance between the sampler's empirical law on `S_n`
/// and the exact Mallows pmf.
pub fn empirical_distribution_check(n: usize, q: f64, cfg: &McConfig) -> Result<f64> {
    cfg.validate()?;
    if n > MAX_DISTRIBUTION_CHECK_N {
        return Err(Error::ResourceLimit {
            what: "distribution check n",
            value: n as u64,
            limit: MAX_DISTRIBUTION_CHECK_N as u64,
        });
    }
    debug_assert!(n <= MAX_ENUMERATE_N);
    let param = MallowsParam::new(q)?;
    let exact: Vec<f64> = enumerate(n)?.map(|p| param.pmf(&p)).collect();
    let cells = exact.len();
    let counts = cfg
        .shard_sizes()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(i, size)| {
            let mut st = SamplerState::child(cfg.seed, i);
            let mut c = vec![0u64; cells];
            for _ in 0..size {
                c[lex_rank(&param.sample(n, &mut st))] += 1;
            }
            c
        })
        .reduce(
            || vec![0u64; cells],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let total = cfg.samples as f64;
    Ok(0.5
        * counts
            .iter()
            .zip(&exact)
            .map(|(&c, &p)| (c as f64 / total - p).abs())
            .sum::<f64>())
}
