//! Generating-function bounds on `L(q) = lim_n P_n^q(S_n(312))^{1/n}`.
//!
//! `G_q(t) = Σ γ_n t^n` has radius of convergence `1/L(q)` and satisfies
//! `G_q(t) = F((1-q) t G_q(qt))` with `F(x) = 1/(1-x)` on `[0, 1)` and `+∞`
//! elsewhere. Unrolling that identity `N` times and replacing the innermost
//! `G_q(q^N t)` by a lower or an upper estimate gives two certificates at
//! `c = (1-q) t`:
//!
//! * lower chain `= +∞`  ⇒ `L > (1-q)/c`;
//! * upper chain finite ⇒ `L < (1-q)/c`.
//!
//! [`limit_312`] bisects on the candidate value with these certificates.

use serde::Serialize;

use crate::error::{check_unit_q, Error, Result};
use crate::exact::scaled_gamma_seq;

/// Arguments of `F` at or above `1 - NEAR_ONE_GUARD` map to `+∞`.
pub const NEAR_ONE_GUARD: f64 = 1e-15;

/// Default ceiling of the depth escalation `8, 16, 32, …`.
pub const DEFAULT_DEPTH_CAP: usize = 1 << 16;

/// A nonnegative real or `+∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinite,
}

impl ExtendedReal {
    pub fn is_infinite(self) -> bool {
        matches!(self, ExtendedReal::Infinite)
    }

    pub fn is_finite(self) -> bool {
        !self.is_infinite()
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            ExtendedReal::Infinite => None,
        }
    }
}

/// `F(x) = 1/(1-x)` for `x ∈ [0, 1)`, `+∞` otherwise (negative `x` included).
#[allow(non_snake_case)]
pub fn F_extended(x: f64) -> ExtendedReal {
    if !(0.0..1.0 - NEAR_ONE_GUARD).contains(&x) {
        ExtendedReal::Infinite
    } else {
        ExtendedReal::Finite(1.0 / (1.0 - x))
    }
}

/// Runs `v ← c q^k F(v)` for `k = start-1` down to `0` and returns `F(v)`.
fn outer_chain(mut v: f64, c: f64, q: f64, start: usize) -> ExtendedReal {
    for k in (0..start).rev() {
        match F_extended(v) {
            ExtendedReal::Infinite => return ExtendedReal::Infinite,
            ExtendedReal::Finite(f) => v = c * q.powi(k as i32) * f,
        }
    }
    F_extended(v)
}

fn check_chain_args(c: f64, q: f64, c_max_inclusive: bool, n: usize, n_min: usize) -> Result<()> {
    check_unit_q(q)?;
    let c_ok = c.is_finite() && c > 0.0 && if c_max_inclusive { c <= 1.0 } else { c < 1.0 };
    if !c_ok {
        let range = if c_max_inclusive { "(0, 1]" } else { "(0, 1)" };
        return Err(Error::Domain(format!("c must lie in {range}, got {c}")));
    }
    if n < n_min {
        return Err(Error::Domain(format!(
            "depth N must be >= {n_min}, got {n}"
        )));
    }
    Ok(())
}

/// `F(cF(cq ⋯ F(cq^{N-1}(1 + cq^N)) ⋯))`; `+∞` certifies `L > (1-q)/c`.
pub fn iterated_lower_condition(c: f64, q: f64, depth: usize) -> Result<ExtendedReal> {
    check_chain_args(c, q, true, depth, 1)?;
    let inner = c * q.powi(depth as i32 - 1) * (1.0 + c * q.powi(depth as i32));
    Ok(outer_chain(inner, c, q, depth - 1))
}

/// `F(cF(cq ⋯ cq^{N-2}F(cq^{N-1}) ⋯))`, the lower chain without the `1 + cq^N`
/// tail; `+∞` also certifies `L > (1-q)/c`.
pub fn iterated_lower_condition_no_tail(c: f64, q: f64, depth: usize) -> Result<ExtendedReal> {
    check_chain_args(c, q, true, depth, 2)?;
    let inner = c * q.powi(depth as i32 - 1);
    Ok(outer_chain(inner, c, q, depth - 1))
}

/// `F(cF(cq ⋯ F(cq^{N-1}F(cq^N/(1-q))) ⋯))`; a finite value certifies `L < (1-q)/c`.
pub fn iterated_upper_condition(c: f64, q: f64, depth: usize) -> Result<ExtendedReal> {
    check_chain_args(c, q, false, depth, 1)?;
    let mut v = match F_extended(c * q.powi(depth as i32) / (1.0 - q)) {
        ExtendedReal::Infinite => return Ok(ExtendedReal::Infinite),
        ExtendedReal::Finite(f) => f,
    };
    for k in (0..depth).rev() {
        match F_extended(c * q.powi(k as i32) * v) {
            ExtendedReal::Infinite => return Ok(ExtendedReal::Infinite),
            ExtendedReal::Finite(f) => v = f,
        }
    }
    Ok(ExtendedReal::Finite(v))
}

// ---------------------------------------------------------------------------
// Truncated generating function

/// `Σ_{n=0}^N γ_n t^n`.
#[allow(non_snake_case)]
pub fn G_truncated(t: f64, q: f64, n_terms: usize) -> Result<f64> {
    Ok(*G_partial_sums(t, q, n_terms)?.last().unwrap())
}

/// Partial sums `Σ_{n=0}^M γ_n t^n` for `M = 0..=N`.
#[allow(non_snake_case)]
pub fn G_partial_sums(t: f64, q: f64, n_terms: usize) -> Result<Vec<f64>> {
    check_unit_q(q)?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Domain(format!("t must be finite and >= 0, got {t}")));
    }
    let mut acc = 0.0;
    Ok(scaled_gamma_seq(n_terms, q, t)
        .into_iter()
        .map(|b| {
            acc += b;
            acc
        })
        .collect())
}

/// Smallest `N` with `t^N / (1 - t) < 1e-10` (a tail bound using `γ_n <= 1`).
pub fn residual_truncation_length(t: f64) -> Option<usize> {
    if !(0.0..1.0).contains(&t) {
        return None;
    }
    if t == 0.0 {
        return Some(1);
    }
    Some(((1e-10 * (1.0 - t)).ln() / t.ln()).ceil().max(1.0) as usize)
}

/// A radius certified to lie below that of `G_q`: `1 / min(UB(q), 4(1-q))`.
pub fn certified_radius(q: f64) -> Result<f64> {
    let b = closed_form_bounds(q)?;
    Ok(1.0 / b.ub.min(catalan_upper_bound(q)?))
}

/// `|G_N(t) (1 - (1-q) t G_N(qt)) - 1|` for `t` inside [`certified_radius`].
pub fn functional_equation_residual(t: f64, q: f64, n_terms: usize) -> Result<f64> {
    let radius = certified_radius(q)?;
    if !(t >= 0.0 && t < radius) {
        return Err(Error::Domain(format!(
            "t = {t} outside the certified disk [0, {radius})"
        )));
    }
    let g = G_truncated(t, q, n_terms)?;
    let gq = G_truncated(q * t, q, n_terms)?;
    Ok((g * (1.0 - (1.0 - q) * t * gq) - 1.0).abs())
}

// ---------------------------------------------------------------------------
// Closed forms

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClosedFormBounds {
    pub lb: f64,
    pub ub: f64,
}

/// `LB(q) = 2q²(1-q)(1-q³) / (1 - q⁴ - √((1-q⁴)² - 4q²(1-q)(1-q³)))` and
/// `UB(q) = 2q²(q²+1)(1-q) / (1 - √(1 - 4(1-q)q²(q²+1)))`.
pub fn closed_form_bounds(q: f64) -> Result<ClosedFormBounds> {
    check_unit_q(q)?;
    let q2 = q * q;
    let q3 = q2 * q;
    let q4 = q2 * q2;
    let disc_lb = (1.0 - q4).powi(2) - 4.0 * q2 * (1.0 - q) * (1.0 - q3);
    let disc_ub = 1.0 - 4.0 * (1.0 - q) * q2 * (q2 + 1.0);
    if disc_lb < 0.0 || disc_ub < 0.0 {
        return Err(Error::Domain(format!(
            "negative discriminant at q = {q} ({disc_lb}, {disc_ub}); this is a bug"
        )));
    }
    Ok(ClosedFormBounds {
        lb: 2.0 * q2 * (1.0 - q) * (1.0 - q3) / (1.0 - q4 - disc_lb.sqrt()),
        ub: 2.0 * q2 * (q2 + 1.0) * (1.0 - q) / (1.0 - disc_ub.sqrt()),
    })
}

/// Smaller root of `(q²+q³+q⁴)c² - (1+q+q²+q³)c + 1`: the threshold above
/// which the depth-4 lower chain without tail is infinite.
pub fn lower_root_depth4(q: f64) -> Result<f64> {
    check_unit_q(q)?;
    let a = q * q * (1.0 + q + q * q);
    let b = 1.0 + q + q * q + q * q * q;
    // rationalized form, stable for small q
    Ok(2.0 / (b + (b * b - 4.0 * a).sqrt()))
}

/// `(1 - √(1 - 4q²(1-q)(1+q²))) / (2q²(1+q²))`: the threshold below which the
/// depth-3 upper chain is finite.
pub fn upper_root_depth3(q: f64) -> Result<f64> {
    check_unit_q(q)?;
    let a = q * q * (1.0 + q * q);
    let disc = 1.0 - 4.0 * a * (1.0 - q);
    Ok(2.0 * (1.0 - q) / (1.0 + disc.sqrt()))
}

/// `4(1-q)`, an upper bound on `L(q)` that is only informative for `q > 3/4`.
pub fn catalan_upper_bound(q: f64) -> Result<f64> {
    check_unit_q(q)?;
    Ok(4.0 * (1.0 - q))
}

/// `lim_n P_n^q(S_n(123))^{1/n²} = q^{1/4}`.
pub fn exponent_123(q: f64) -> Result<f64> {
    check_unit_q(q)?;
    Ok(q.powf(0.25))
}

/// `lim_n P_n^q(S_n(132))^{1/n} = lim_n P_n^q(S_n(213))^{1/n} = 1 - q`.
pub fn limit_132(q: f64) -> Result<f64> {
    check_unit_q(q)?;
    Ok(1.0 - q)
}

// ---------------------------------------------------------------------------
// Bisection

/// Outcome of testing one candidate value `x` against `L(q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// `L > x`, proven at the given depth.
    Above(usize),
    /// `L < x`, proven at the given depth.
    Below(usize),
    /// Neither chain fired up to the depth cap.
    Undecided(usize),
}

/// Depth schedule `8, 16, …` capped at (and ending with) `depth_cap`.
fn depth_schedule(depth_cap: usize) -> impl Iterator<Item = usize> {
    let mut next = Some(8usize.min(depth_cap));
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur >= depth_cap {
            None
        } else {
            Some((cur * 2).min(depth_cap))
        };
        Some(cur)
    })
}

/// Tests whether `L(q)` lies above or below `x` by escalating the chain depth.
pub fn certify(x: f64, q: f64, depth_cap: usize) -> Result<Certificate> {
    check_unit_q(q)?;
    let c = (1.0 - q) / x;
    let mut last = 0;
    for depth in depth_schedule(depth_cap) {
        last = depth;
        if c > 0.0 && c <= 1.0 && iterated_lower_condition(c, q, depth)?.is_infinite() {
            return Ok(Certificate::Above(depth));
        }
        if c > 0.0 && c < 1.0 && iterated_upper_condition(c, q, depth)?.is_finite() {
            return Ok(Certificate::Below(depth));
        }
    }
    Ok(Certificate::Undecided(last))
}

/// A certified bracket for `L(q)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LimitBracket {
    pub lo: f64,
    pub hi: f64,
    /// Largest chain depth evaluated.
    pub depth_used: usize,
    /// Set when a midpoint could not be decided within the depth cap.
    pub flagged: bool,
}

impl LimitBracket {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Bisects on the candidate value starting from `[LB(q), min(UB(q), 4(1-q))]`
/// until the bracket is at most `eps` wide.
///
/// Both endpoints only ever move on a certificate, so the bracket is sound.
/// If a midpoint is undecided at `depth_cap`, the points a quarter-width to
/// either side are tried once, the bracket is narrowed by whichever of them
/// certifies, and the result is flagged.
pub fn limit_312(q: f64, eps: f64, depth_cap: usize) -> Result<LimitBracket> {
    check_unit_q(q)?;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    if depth_cap == 0 {
        return Err(Error::Domain("depth_cap must be >= 1".into()));
    }
    let cf = closed_form_bounds(q)?;
    let mut br = LimitBracket {
        lo: cf.lb,
        hi: cf.ub.min(catalan_upper_bound(q)?),
        depth_used: 0,
        flagged: false,
    };
    while br.width() > eps {
        let x = br.mid();
        match certify(x, q, depth_cap)? {
            Certificate::Above(d) => {
                br.lo = x;
                br.depth_used = br.depth_used.max(d);
            }
            Certificate::Below(d) => {
                br.hi = x;
                br.depth_used = br.depth_used.max(d);
            }
            Certificate::Undecided(d) => {
                br.depth_used = br.depth_used.max(d);
                br.flagged = true;
                let delta = 0.25 * br.width();
                if let Certificate::Above(d) = certify(x - delta, q, depth_cap)? {
                    br.lo = x - delta;
                    br.depth_used = br.depth_used.max(d);
                }
                if let Certificate::Below(d) = certify(x + delta, q, depth_cap)? {
                    br.hi = x + delta;
                    br.depth_used = br.depth_used.max(d);
                }
                break;
            }
        }
    }
    Ok(br)
}

/// Every bound available at one `q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub q: f64,
    pub lb_closed: f64,
    pub ub_closed: f64,
    pub catalan_ub: f64,
    pub interval: LimitBracket,
}

impl BoundReport {
    pub fn compute(q: f64, eps: f64, depth_cap: usize) -> Result<Self> {
        let cf = closed_form_bounds(q)?;
        Ok(Self {
            q,
            lb_closed: cf.lb,
            ub_closed: cf.ub,
            catalan_ub: catalan_upper_bound(q)?,
            interval: limit_312(q, eps, depth_cap)?,
        })
    }
}

/// Finds the transition point of a monotone predicate on `(lo, hi)` to `tol`:
/// `pred(lo)` and `pred(hi)` must differ.
pub fn bisect_transition(
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    mut pred: impl FnMut(f64) -> Result<bool>,
) -> Result<f64> {
    let at_lo = pred(lo)?;
    if pred(hi)? == at_lo {
        return Err(Error::Domain(format!(
            "predicate does not change between {lo} and {hi}"
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if pred(mid)? == at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
