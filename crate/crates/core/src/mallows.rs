//! The Mallows(q) law on `S_n`: `P(σ) = q^{inv(σ)} / Z_n(q)`.
//!
//! Core routines take `q ∈ (0, 1)`. [`MallowsParam`] admits any positive `q`:
//! `q = 1` is the uniform law and `q > 1` is evaluated through the duality
//! `P_n^q(σ) = P_n^{1/q}(σ^rev)`.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_unit_q, Error, Result};
use crate::perm::{LehmerWord, Permutation};
use crate::qpoly::QPolynomial;

/// Identifier of the generator behind [`SamplerState`], recorded in outputs.
pub const RNG_ID: &str = "chacha8";

/// How a positive `q` is evaluated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Reduction {
    /// `q ∈ (0, 1)`, used directly.
    Direct(f64),
    /// `q = 1`.
    Uniform,
    /// `q > 1`, evaluated at the contained `1/q` on reversed permutations.
    Dual(f64),
}

/// A validated Mallows parameter `q > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MallowsParam {
    q: f64,
}

impl MallowsParam {
    pub fn new(q: f64) -> Result<Self> {
        if q.is_finite() && q > 0.0 {
            Ok(Self { q })
        } else {
            Err(Error::Domain(format!(
                "q must be finite and positive, got {q}"
            )))
        }
    }

    pub fn q(self) -> f64 {
        self.q
    }

    pub fn reduction(self) -> Reduction {
        if self.q == 1.0 {
            Reduction::Uniform
        } else if self.q < 1.0 {
            Reduction::Direct(self.q)
        } else {
            Reduction::Dual(1.0 / self.q)
        }
    }

    pub fn pmf(self, p: &Permutation) -> f64 {
        match self.reduction() {
            Reduction::Direct(q) => pmf_unchecked(p, q),
            Reduction::Uniform => (-ln_factorial(p.len())).exp(),
            Reduction::Dual(q) => pmf_unchecked(&p.reverse(), q),
        }
    }

    pub fn sample(self, n: usize, state: &mut SamplerState) -> Permutation {
        match self.reduction() {
            Reduction::Direct(q) => sample_lehmer(n, q, state).decode(),
            Reduction::Uniform => {
                // uniform insertion positions
                let x = (1..=n as u32)
                    .map(|j| state.rng.random_range(0..j))
                    .collect();
                LehmerWord::from_vec_unchecked(x).decode()
            }
            Reduction::Dual(q) => sample_lehmer(n, q, state).decode().reverse(),
        }
    }
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `ln [k]_q = ln((1 - q^k)/(1 - q))`, accurate for `q` near 0 and 1.
fn ln_q_integer(k: usize, q: f64) -> f64 {
    let lq = q.ln();
    ((-(k as f64 * lq).exp_m1()) / (-lq.exp_m1())).ln()
}

/// `ln Z_n(q)` for `q ∈ (0, 1)`.
pub fn ln_normalizer(n: usize, q: f64) -> f64 {
    (1..=n).map(|k| ln_q_integer(k, q)).sum()
}

/// `Z_n(q) = Π_{k=1}^n (1 - q^k)/(1 - q)`; requires `q ∈ (0, 1)`.
pub fn normalizer(n: usize, q: f64) -> Result<f64> {
    check_unit_q(q)?;
    Ok(ln_normalizer(n, q).exp())
}

/// `Σ_{σ ∈ S_n} q^{inv(σ)} = Π_{k=1}^n (1 + q + … + q^{k-1})` as an exact polynomial.
pub fn normalizer_poly(n: usize) -> QPolynomial {
    (1..=n).fold(QPolynomial::one(), |acc, k| {
        &acc * &QPolynomial::q_integer(k)
    })
}

fn pmf_unchecked(p: &Permutation, q: f64) -> f64 {
    (p.inversions() as f64 * q.ln() - ln_normalizer(p.len(), q)).exp()
}

/// Mallows probability of `p`; requires `q ∈ (0, 1)`.
pub fn pmf(p: &Permutation, q: f64) -> Result<f64> {
    check_unit_q(q)?;
    Ok(pmf_unchecked(p, q))
}

/// Exact `q^{inv(p)} / Σ_σ q^{inv(σ)}` for any positive rational `q` (no duality needed).
pub fn pmf_exact(p: &Permutation, q: &BigRational) -> Result<BigRational> {
    if *q <= BigRational::zero() {
        return Err(Error::Domain(format!("q must be positive, got {q}")));
    }
    let num = num_traits::pow(q.clone(), p.inversions() as usize);
    Ok(num / normalizer_poly(p.len()).eval_rational(q))
}

/// `P(X_j = m) = (1 - q) q^m / (1 - q^j)` for `m ∈ [0, j-1]`.
pub fn truncated_geometric_pmf(j: usize, m: usize, q: f64) -> Result<f64> {
    check_unit_q(q)?;
    if j == 0 || m >= j {
        return Err(Error::Domain(format!(
            "truncated geometric needs j >= 1 and 0 <= m <= j-1, got j={j}, m={m}"
        )));
    }
    Ok((1.0 - q) * q.powi(m as i32) / (1.0 - q.powi(j as i32)))
}

/// Exact rational version of [`truncated_geometric_pmf`].
pub fn truncated_geometric_pmf_exact(j: usize, m: usize, q: &BigRational) -> Result<BigRational> {
    if j == 0 || m >= j {
        return Err(Error::Domain(format!(
            "truncated geometric needs j >= 1 and 0 <= m <= j-1, got j={j}, m={m}"
        )));
    }
    let one = BigRational::one();
    Ok((&one - q) * num_traits::pow(q.clone(), m) / (&one - num_traits::pow(q.clone(), j)))
}

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of child stream `index` under `master`:
/// `splitmix64(master ^ splitmix64(index))`.
pub fn split_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

/// Single-owner RNG state; equal seeds give equal streams.
#[derive(Clone, Debug)]
pub struct SamplerState {
    rng: ChaCha8Rng,
    seed: u64,
}

impl SamplerState {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
        }
    }

    /// Independent stream for shard `index`, see [`split_seed`].
    pub fn child(master: u64, index: u64) -> Self {
        Self::new(split_seed(master, index))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// A uniform variate in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }
}

/// Inverse-CDF draw of `X_j`: `⌊ln(1 - U(1 - q^j)) / ln q⌋`, clamped to `[0, j-1]`.
pub fn sample_truncated_geometric(j: usize, q: f64, state: &mut SamplerState) -> u32 {
    debug_assert!(j >= 1);
    if j == 1 {
        return 0;
    }
    let u = state.uniform();
    let mass = -(j as f64 * q.ln()).exp_m1(); // 1 - q^j
    let m = ((-u * mass).ln_1p() / q.ln()).floor();
    if m.is_nan() || m < 0.0 {
        0
    } else {
        (m as u64).min(j as u64 - 1) as u32
    }
}

/// The displacement word `(X_1, …, X_n)` of the online construction.
pub fn sample_lehmer(n: usize, q: f64, state: &mut SamplerState) -> LehmerWord {
    let x = (1..=n)
        .map(|j| sample_truncated_geometric(j, q, state))
        .collect();
    LehmerWord::from_vec_unchecked(x)
}

/// A Mallows(q) permutation of `[n]` by the online construction.
///
/// `q = 1` draws uniform insertion positions; `q > 1` draws at `1/q` and reverses.
pub fn sample_permutation(n: usize, q: f64, state: &mut SamplerState) -> Result<Permutation> {
    Ok(MallowsParam::new(q)?.sample(n, state))
}

/// `P_n^q(σ = id) = (1 - q)^n / Π_{j=1}^n (1 - q^j)`.
pub fn identity_probability(n: usize, q: f64) -> Result<f64> {
    check_unit_q(q)?;
    Ok(ln_identity_probability(n, q).exp())
}

pub fn ln_identity_probability(n: usize, q: f64) -> f64 {
    let lq = q.ln();
    (1..=n)
        .map(|j| (-lq.exp_m1()).ln() - (-(j as f64 * lq).exp_m1()).ln())
        .sum()
}
