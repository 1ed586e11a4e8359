//! Exact and recursive avoidance probabilities `d_n = P_n^q(S_n(τ))`.
//!
//! Three routes are provided and cross-checked against each other:
//! a brute-force enumeration oracle producing exact `q`-polynomials, the
//! convolution recurrences for the 312/231 and 213/132 classes in log space,
//! and an exact-rational variant of the same recurrences.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{check_unit_q, guard, Error, Result};
use crate::logreal::{log_sum_exp, LogReal};
use crate::mallows::{ln_normalizer, normalizer_poly};
use crate::perm::{contains_in, count_inversions, enumerate_blocks, Pattern};
use crate::qpoly::QPolynomial;

pub const MAX_BRUTE_FORCE_N: usize = 12;
pub const MAX_EXACT_RECURRENCE_N: usize = 30;
pub const MAX_MONOTONE_INDEX: usize = 10_000;

/// `ln w_n = Σ_{l=1}^n ln(1 - q^l)` for `n = 0..=n_max`.
pub fn ln_w_seq(n_max: usize, q: f64) -> Vec<f64> {
    let lq = q.ln();
    let mut out = Vec::with_capacity(n_max + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for l in 1..=n_max {
        acc += (-(l as f64 * lq).exp_m1()).ln();
        out.push(acc);
    }
    out
}

/// `w_n = Π_{l=1}^n (1 - q^l)`, `w_0 = 1`.
pub fn w_seq(n_max: usize, q: f64) -> Result<Vec<f64>> {
    check_unit_q(q)?;
    let mut out = Vec::with_capacity(n_max + 1);
    let mut acc = 1.0;
    out.push(acc);
    for l in 1..=n_max {
        acc *= 1.0 - q.powi(l as i32);
        out.push(acc);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Brute-force oracle

/// Avoidance numerators `Σ_{σ ∈ S_n(τ)} q^{inv(σ)}` with the matching normalizer.
#[derive(Clone, Debug, PartialEq)]
pub struct BruteForce {
    pub n: usize,
    pub pattern: Pattern,
    pub numerator: QPolynomial,
    pub normalizer: QPolynomial,
}

impl BruteForce {
    /// `numerator(q) / normalizer(q)`, exact for any positive rational `q`.
    pub fn probability_exact(&self, q: &BigRational) -> BigRational {
        self.numerator.eval_rational(q) / self.normalizer.eval_rational(q)
    }

    /// Floating value, computed through the exact rational image of `q`.
    pub fn probability(&self, q: f64) -> f64 {
        let qr = BigRational::from_float(q).expect("finite q");
        self.probability_exact(&qr).to_f64().unwrap_or(f64::NAN)
    }
}

/// Enumerates `S_n` once and returns the avoidance numerator of every
/// requested pattern, in order. Blocks are processed in parallel and merged
/// by coefficient-wise addition.
pub fn brute_force_numerators(n: usize, patterns: &[Pattern]) -> Result<Vec<QPolynomial>> {
    guard("brute-force n", n as u64, MAX_BRUTE_FORCE_N as u64)?;
    let max_inv = n * n.saturating_sub(1) / 2;
    let blocks = enumerate_blocks(n, 256.min(crate::perm::factorial(n) as usize))?;
    let zero = || vec![vec![0u64; max_inv + 1]; patterns.len()];
    let counts = blocks
        .par_iter()
        .map(|block| {
            let mut acc = zero();
            block.for_each_word(|w| {
                let inv = count_inversions(w) as usize;
                for (slot, t) in acc.iter_mut().zip(patterns) {
                    if !contains_in(w, t) {
                        slot[inv] += 1;
                    }
                }
            });
            acc
        })
        .reduce(zero, |mut a, b| {
            for (x, y) in a.iter_mut().zip(&b) {
                for (u, v) in x.iter_mut().zip(y) {
                    *u += v;
                }
            }
            a
        });
    Ok(counts.iter().map(|c| QPolynomial::from_counts(c)).collect())
}

/// Brute-force oracle for a single pattern.
pub fn brute_force_avoidance(n: usize, pattern: &Pattern) -> Result<BruteForce> {
    let numerator = brute_force_numerators(n, std::slice::from_ref(pattern))?
        .pop()
        .expect("one pattern");
    Ok(BruteForce {
        n,
        pattern: pattern.clone(),
        numerator,
        normalizer: normalizer_poly(n),
    })
}

// ---------------------------------------------------------------------------
// Recurrences

/// Which convolution recurrence governs a pattern class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecurrenceFamily {
    /// 312 and 231: weight `q^{k-1}`.
    Basic1,
    /// 213 and 132: weight `q^{(n-k+1)(k-1)}`.
    Basic2,
}

impl RecurrenceFamily {
    pub fn for_pattern(pattern: &Pattern) -> Result<Self> {
        match pattern {
            Pattern::P312 | Pattern::P231 => Ok(Self::Basic1),
            Pattern::P213 | Pattern::P132 => Ok(Self::Basic2),
            other => Err(Error::Domain(format!(
                "no avoidance recurrence for pattern {other}"
            ))),
        }
    }

    fn exponent(self, n: usize, k: usize) -> u64 {
        match self {
            Self::Basic1 => (k - 1) as u64,
            Self::Basic2 => ((n - k + 1) * (k - 1)) as u64,
        }
    }
}

/// `d_0, d_1, …, d_N` for one pattern at one `q`, in log space.
#[derive(Clone, Debug)]
pub struct AvoidanceSeries {
    pub pattern: Pattern,
    pub q: f64,
    d: Vec<LogReal>,
}

impl AvoidanceSeries {
    /// Largest computed `n`.
    pub fn n_max(&self) -> usize {
        self.d.len() - 1
    }

    pub fn d(&self, n: usize) -> LogReal {
        self.d[n]
    }

    /// `d_n^{1/n}` for `n >= 1`.
    pub fn root(&self, n: usize) -> f64 {
        (self.d[n].ln() / n as f64).exp()
    }

    /// `(n, d_n, ln d_n, d_n^{1/n})` for `n = 1..=N`, the CSV export rows.
    pub fn rows(&self) -> impl Iterator<Item = (usize, f64, f64, f64)> + '_ {
        (1..self.d.len()).map(|n| (n, self.d[n].to_f64(), self.d[n].ln(), self.root(n)))
    }
}

/// `d_n = (1-q) Σ_{k=1}^n q^{e(n,k)} (w_{k-1} w_{n-k} / w_n) d_{k-1} d_{n-k}`
/// with `d_0 = 1`, evaluated term-wise in log space; `O(N²)`.
pub fn avoidance_recurrence(n_max: usize, q: f64, pattern: &Pattern) -> Result<AvoidanceSeries> {
    check_unit_q(q)?;
    let family = RecurrenceFamily::for_pattern(pattern)?;
    let lw = ln_w_seq(n_max, q);
    let lq = q.ln();
    let l1q = (-lq.exp_m1()).ln();
    let mut ld: Vec<f64> = Vec::with_capacity(n_max + 1);
    ld.push(0.0);
    for n in 1..=n_max {
        let s = log_sum_exp((1..=n).map(|k| {
            family.exponent(n, k) as f64 * lq + lw[k - 1] + lw[n - k] - lw[n]
                + ld[k - 1]
                + ld[n - k]
        }));
        ld.push(l1q + s.ln());
    }
    Ok(AvoidanceSeries {
        pattern: pattern.clone(),
        q,
        d: ld.into_iter().map(LogReal::from_ln).collect(),
    })
}

/// The same recurrence in exact rational arithmetic, `d_0..=d_N`; `N <= 30`.
pub fn avoidance_recurrence_exact(
    n_max: usize,
    q: &BigRational,
    pattern: &Pattern,
) -> Result<Vec<BigRational>> {
    guard(
        "exact recurrence n",
        n_max as u64,
        MAX_EXACT_RECURRENCE_N as u64,
    )?;
    let family = RecurrenceFamily::for_pattern(pattern)?;
    let one = BigRational::one();
    if *q <= BigRational::zero() || *q >= one {
        return Err(Error::Domain(format!("q must lie in (0, 1), got {q}")));
    }
    let mut w = vec![one.clone()];
    for l in 1..=n_max {
        let next = &w[l - 1] * (&one - num_traits::pow(q.clone(), l));
        w.push(next);
    }
    let mut d = vec![one.clone()];
    for n in 1..=n_max {
        let mut s = BigRational::zero();
        for k in 1..=n {
            let e = family.exponent(n, k) as usize;
            s += num_traits::pow(q.clone(), e) * &w[k - 1] * &w[n - k] * &d[k - 1] * &d[n - k];
        }
        d.push((&one - q) * s / &w[n]);
    }
    Ok(d)
}

/// `γ_0..=γ_N` from `γ_n = (1-q) Σ_{k=1}^n q^{k-1} γ_{k-1} γ_{n-k}`, `γ_0 = 1`.
///
/// Linear scale: entries underflow once `γ_n < 1e-308` (`n` in the thousands).
pub fn gamma_seq(n_max: usize, q: f64) -> Result<Vec<f64>> {
    check_unit_q(q)?;
    Ok(scaled_gamma_seq(n_max, q, 1.0))
}

/// `β_n = γ_n t^n`, which obeys the same convolution with an extra factor `t`.
/// Terms with `q^{k-1} < 1e-20 (1-q)` are dropped; the recurrence's weights are
/// otherwise bounded, so the relative truncation error stays below that factor.
pub(crate) fn scaled_gamma_seq(n_max: usize, q: f64, t: f64) -> Vec<f64> {
    let cutoff = ((1e-20 * (1.0 - q)).ln() / q.ln()).ceil() as usize + 1;
    let qpow: Vec<f64> = (0..cutoff.min(n_max + 1))
        .map(|k| q.powi(k as i32))
        .collect();
    let scale = (1.0 - q) * t;
    let mut b = Vec::with_capacity(n_max + 1);
    b.push(1.0);
    for n in 1..=n_max {
        let kmax = n.min(qpow.len());
        let s: f64 = (1..=kmax).map(|k| qpow[k - 1] * b[k - 1] * b[n - k]).sum();
        b.push(scale * s);
    }
    b
}

// ---------------------------------------------------------------------------
// Monotone sequences of truncated geometrics

fn check_indices(indices: &[usize]) -> Result<()> {
    if indices.is_empty() {
        return Err(Error::Domain("need at least one index".into()));
    }
    if indices[0] == 0 || indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain(format!(
            "indices must satisfy 1 <= i_1 < … < i_m, got {indices:?}"
        )));
    }
    guard(
        "largest index",
        *indices.last().unwrap() as u64,
        MAX_MONOTONE_INDEX as u64,
    )
}

/// `P(X_{i_1} < X_{i_2} < … < X_{i_m})` for independent truncated geometrics,
/// by a DP over the last value with prefix sums; `O(m · i_m)` time, `O(i_m)` memory.
pub fn monotone_x_probability(indices: &[usize], q: f64) -> Result<f64> {
    check_unit_q(q)?;
    check_indices(indices)?;
    let top = *indices.last().unwrap();
    let geo = |j: usize, v: usize| (1.0 - q) * q.powi(v as i32) / (1.0 - q.powi(j as i32));
    let mut f: Vec<f64> = vec![0.0; top];
    for (v, fv) in f.iter_mut().enumerate().take(indices[0]) {
        *fv = geo(indices[0], v);
    }
    let mut support = indices[0];
    for &j in &indices[1..] {
        let mut below = 0.0;
        let mut g = vec![0.0; top];
        for v in 0..j {
            g[v] = geo(j, v) * below;
            if v < support {
                below += f[v];
            }
        }
        f = g;
        support = j;
    }
    Ok(f[..support].iter().sum())
}

/// The bracket `(w_m q^{m(m-1)/2} / Z_m, q^{m(m-1)/2} / (Z_m w_m))` around
/// every monotone probability over `m` indices.
pub fn monotone_x_bounds(m: usize, q: f64) -> Result<(f64, f64)> {
    check_unit_q(q)?;
    if m == 0 {
        return Err(Error::Domain("m must be >= 1".into()));
    }
    let lw = *ln_w_seq(m, q).last().unwrap();
    let core = (m * (m - 1) / 2) as f64 * q.ln() - ln_normalizer(m, q);
    Ok(((lw + core).exp(), (core - lw).exp()))
}

/// Lower bound on `P_n^q(S_n(123))`: the maximum over `m ∈ [n]` of
/// `w_{n-m} / (Z_{n-m} Z_m) · q^{((m-1)m + (n-m-1)(n-m))/2}`.
pub fn lower_bound_123(n: usize, q: f64) -> Result<LogReal> {
    check_unit_q(q)?;
    if n == 0 {
        return Err(Error::Domain("n must be >= 1".into()));
    }
    let lw = ln_w_seq(n, q);
    let lz: Vec<f64> = (0..=n).map(|k| ln_normalizer(k, q)).collect();
    let lq = q.ln();
    let best = (1..=n)
        .map(|m| {
            let r = n - m;
            let e = (m * (m - 1) + r * r.saturating_sub(1)) as f64 / 2.0;
            lw[r] - lz[r] - lz[m] + e * lq
        })
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(LogReal::from_ln(best))
}

// ---------------------------------------------------------------------------
// Uniform case

pub fn catalan(n: usize) -> BigUint {
    let mut c = BigUint::one();
    for k in 0..n {
        c = c * BigUint::from(2 * (2 * k + 1)) / BigUint::from(k + 2);
    }
    c
}

/// `C_n / n!`, the exact uniform avoidance probability for every `τ ∈ S_3`.
pub fn uniform_avoidance_exact(n: usize) -> BigRational {
    let fact: BigUint = (1..=n as u64).map(BigUint::from).product();
    BigRational::new(BigInt::from(catalan(n)), BigInt::from(fact))
}

/// `(4e)^n / (√2 π n^{n+2})`, evaluated in log space.
pub fn uniform_asymptotic(n: usize) -> Result<LogReal> {
    if n == 0 {
        return Err(Error::Domain("n must be >= 1".into()));
    }
    let nf = n as f64;
    let ln = nf * (4.0f64.ln() + 1.0)
        - 0.5 * 2.0f64.ln()
        - std::f64::consts::PI.ln()
        - (nf + 2.0) * nf.ln();
    Ok(LogReal::from_ln(ln))
}

/// Direct floating evaluation of the same expression (overflows past `n ≈ 140`).
pub fn uniform_asymptotic_direct(n: usize) -> f64 {
    let nf = n as f64;
    (4.0 * std::f64::consts::E).powi(n as i32)
        / (std::f64::consts::SQRT_2 * std::f64::consts::PI * nf.powi(n as i32 + 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mallows::{pmf_exact, sample_truncated_geometric, SamplerState};
    use crate::perm::{enumerate, Permutation};
    use std::collections::HashMap;

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn w_examples() {
        let w = w_seq(40, 0.5).unwrap();
        assert_eq!(w[0], 1.0);
        assert!((w[2] - 0.375).abs() < 1e-15);
        assert!(w.windows(2).all(|p| p[1] < p[0]));
        // Euler function φ(1/2) ≈ 0.288788
        assert!(w[40] > 0.2887 && w[40] < 0.2888);
        let lw = ln_w_seq(40, 0.5);
        for n in 0..=40 {
            assert!((lw[n].exp() - w[n]).abs() < 1e-14);
        }
    }

    #[test]
    fn brute_force_examples() {
        let bf = brute_force_avoidance(3, &Pattern::P312).unwrap();
        assert_eq!(bf.numerator.to_string(), "1 + 2q + q^2 + q^3");
        assert!((bf.probability(0.5) - 2.375 / 2.625).abs() < 1e-15);
        assert_eq!(bf.probability_exact(&rat(1, 2)), rat(19, 21));
        let bf = brute_force_avoidance(3, &Pattern::P213).unwrap();
        assert_eq!(bf.probability_exact(&rat(1, 2)), rat(17, 21));
        assert!(matches!(
            brute_force_avoidance(13, &Pattern::P123),
            Err(Error::ResourceLimit { .. })
        ));
        let bf = brute_force_avoidance(4, &Pattern::P231).unwrap();
        assert_eq!(bf.probability_exact(&rat(1, 1)), rat(14, 24));
    }

    #[test]
    fn numerators_have_valid_shape() {
        for n in 0..=7 {
            let polys = brute_force_numerators(n, &Pattern::S3).unwrap();
            for p in &polys {
                assert!(p.has_nonnegative_coeffs());
                assert!(p.degree().unwrap_or(0) <= n * n.saturating_sub(1) / 2);
                assert_eq!(p.at_one(), BigInt::from(catalan(n)));
            }
        }
    }

    #[test]
    fn recurrence_small_values() {
        for t in [Pattern::P312, Pattern::P231, Pattern::P213, Pattern::P132] {
            let s = avoidance_recurrence(3, 0.5, &t).unwrap();
            assert!((s.d(1).to_f64() - 1.0).abs() < 1e-15);
            assert!((s.d(2).to_f64() - 1.0).abs() < 1e-15);
        }
        let s = avoidance_recurrence(3, 0.5, &Pattern::P312).unwrap();
        assert!((s.d(3).to_f64() - 19.0 / 21.0).abs() < 1e-14);
        let s = avoidance_recurrence(3, 0.5, &Pattern::P213).unwrap();
        assert!((s.d(3).to_f64() - 17.0 / 21.0).abs() < 1e-14);
        assert!(avoidance_recurrence(3, 0.5, &Pattern::P123).is_err());
        assert!(avoidance_recurrence(3, 1.5, &Pattern::P312).is_err());
    }

    #[test]
    fn recurrence_matches_oracle_at_eight() {
        let bf = brute_force_avoidance(8, &Pattern::P312).unwrap();
        let s = avoidance_recurrence(8, 0.5, &Pattern::P312).unwrap();
        let exact = bf.probability(0.5);
        assert!(((s.d(8).to_f64() - exact) / exact).abs() < 1e-12);
    }

    #[test]
    fn exact_recurrence_matches_oracle() {
        let q = rat(1, 3);
        for t in [Pattern::P312, Pattern::P132] {
            let d = avoidance_recurrence_exact(7, &q, &t).unwrap();
            for (n, dn) in d.iter().enumerate() {
                let bf = brute_force_avoidance(n, &t).unwrap();
                assert_eq!(*dn, bf.probability_exact(&q), "{t} n={n}");
            }
        }
        assert!(avoidance_recurrence_exact(31, &q, &Pattern::P312).is_err());
    }

    #[test]
    fn series_is_nonincreasing_in_unit_interval() {
        for t in [Pattern::P312, Pattern::P213] {
            let s = avoidance_recurrence(300, 0.6, &t).unwrap();
            for n in 1..=300 {
                assert!(s.d(n).ln() <= 1e-12);
                assert!(s.d(n).ln() > f64::NEG_INFINITY);
                if n > 1 {
                    assert!(s.d(n).ln() <= s.d(n - 1).ln() + 1e-12);
                }
            }
        }
    }

    #[test]
    fn gamma_examples() {
        let q = 0.3;
        let g = gamma_seq(200, q).unwrap();
        assert_eq!(g[0], 1.0);
        assert!((g[1] - (1.0 - q)).abs() < 1e-15);
        assert!((g[2] - (1.0 - q) * (1.0 - q * q)).abs() < 1e-15);
        let w = w_seq(200, q).unwrap();
        let s = avoidance_recurrence(200, q, &Pattern::P312).unwrap();
        for n in 0..=200 {
            let expect = w[n] * s.d(n).to_f64();
            assert!(((g[n] - expect) / expect).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn monotone_examples() {
        assert_eq!(monotone_x_probability(&[5], 0.5).unwrap(), 1.0);
        assert!((monotone_x_probability(&[1, 2], 0.5).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(monotone_x_probability(&[2, 2], 0.5).is_err());
        assert!(monotone_x_probability(&[0, 2], 0.5).is_err());
        assert!(monotone_x_probability(&[1, 10_001], 0.5).is_err());
        let (lo, hi) = monotone_x_bounds(1, 0.4).unwrap();
        assert!((lo - 0.6).abs() < 1e-15 && (hi - 1.0 / 0.6).abs() < 1e-14);
        let (lo, hi) = monotone_x_bounds(2, 0.5).unwrap();
        assert!((lo - 0.125).abs() < 1e-15);
        assert!((hi - 0.5 / (1.5 * 0.375)).abs() < 1e-15);
    }

    #[test]
    fn monotone_dp_matches_enumeration() {
        // enumerate all value vectors for indices (2, 3, 5)
        let q = 0.6;
        let idx = [2usize, 3, 5];
        let mut total = 0.0;
        for a in 0..2 {
            for b in 0..3 {
                for c in 0..5 {
                    if a < b && b < c {
                        total += [(2, a), (3, b), (5, c)]
                            .iter()
                            .map(|&(j, v)| {
                                crate::mallows::truncated_geometric_pmf(j, v, q).unwrap()
                            })
                            .product::<f64>();
                    }
                }
            }
        }
        let dp = monotone_x_probability(&idx, q).unwrap();
        assert!((dp - total).abs() < 1e-15);
    }

    #[test]
    fn monotone_dp_against_sampler() {
        let q = 0.5;
        let dp = monotone_x_probability(&[2, 3, 4], q).unwrap();
        let mut st = SamplerState::new(2024);
        let draws = 1_000_000;
        let hits = (0..draws)
            .filter(|_| {
                let a = sample_truncated_geometric(2, q, &mut st);
                let b = sample_truncated_geometric(3, q, &mut st);
                let c = sample_truncated_geometric(4, q, &mut st);
                a < b && b < c
            })
            .count();
        let p = hits as f64 / draws as f64;
        let sigma = (dp * (1.0 - dp) / draws as f64).sqrt();
        assert!((p - dp).abs() < 3.0 * sigma, "mc {p} dp {dp}");
    }

    #[test]
    fn lower_bound_123_examples() {
        for q in [0.2, 0.5, 0.9] {
            let b = lower_bound_123(2, q).unwrap().to_f64();
            assert!(b >= 1.0 - q - 1e-15 && b <= 1.0);
        }
        let exact = brute_force_avoidance(8, &Pattern::P123)
            .unwrap()
            .probability(0.5);
        assert!(lower_bound_123(8, 0.5).unwrap().to_f64() <= exact);
        let target = 0.5f64.powf(0.25);
        let gap = |n: usize| {
            (lower_bound_123(n, 0.5)
                .unwrap()
                .powf(1.0 / (n * n) as f64)
                .to_f64()
                - target)
                .abs()
        };
        assert!(gap(64) < gap(16));
    }

    #[test]
    fn catalan_and_uniform() {
        let c: Vec<u64> = (0..11).map(|n| catalan(n).to_u64().unwrap()).collect();
        assert_eq!(c, vec![1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796]);
        let one = uniform_asymptotic(1).unwrap().to_f64();
        let expect = 4.0 * std::f64::consts::E / (std::f64::consts::SQRT_2 * std::f64::consts::PI);
        assert!((one - expect).abs() < 1e-14);
        for n in 1..=20 {
            let a = uniform_asymptotic(n).unwrap().to_f64();
            let b = uniform_asymptotic_direct(n);
            assert!(((a - b) / b).abs() < 1e-12, "n = {n}");
        }
        let rel = |n: usize| {
            let exact = uniform_avoidance_exact(n);
            let ln_exact =
                exact.numer().to_f64().unwrap().ln() - exact.denom().to_f64().unwrap().ln();
            (uniform_asymptotic(n).unwrap().ln() - ln_exact)
                .exp_m1()
                .abs()
        };
        assert!(rel(50) < 0.05);
        assert!(rel(100) < rel(50) && rel(50) < rel(20));
    }

    #[test]
    fn submultiplicative_on_oracle() {
        let q = rat(1, 2);
        for t in &Pattern::S3 {
            let p: Vec<BigRational> = (0..=8)
                .map(|n| brute_force_avoidance(n, t).unwrap().probability_exact(&q))
                .collect();
            for a in 1..8 {
                for b in 1..=8 - a {
                    assert!(p[a + b] <= &p[a] * &p[b], "{t}: {a}+{b}");
                }
            }
        }
    }

    #[test]
    fn restriction_law_on_s5() {
        // σ_{[2]} has law P_2 and is independent of σ restricted to positions 3..5.
        let q = rat(1, 2);
        let mut joint: HashMap<(Permutation, Permutation), BigRational> = HashMap::new();
        for s in enumerate(5).unwrap() {
            let key = (s.restrict_positions(0..2), s.restrict_positions(2..5));
            *joint.entry(key).or_insert_with(BigRational::zero) += pmf_exact(&s, &q).unwrap();
        }
        assert_eq!(joint.len(), 2 * 6);
        for ((a, b), prob) in &joint {
            let expect = pmf_exact(a, &q).unwrap() * pmf_exact(b, &q).unwrap();
            assert_eq!(*prob, expect, "{a} {b}");
        }
    }
}
