//! A self-check suite over the invariants of each module, for use from the
//! command line. Sizes are kept small so the whole run takes seconds.

use crate::exact::{
    avoidance_recurrence, avoidance_recurrence_exact, brute_force_numerators, catalan,
    lower_bound_123, monotone_x_bounds, monotone_x_probability,
};
use crate::genfunc::{
    closed_form_bounds, functional_equation_residual, iterated_lower_condition,
    iterated_upper_condition, limit_312, DEFAULT_DEPTH_CAP,
};
use crate::mallows::{normalizer_poly, pmf_exact, truncated_geometric_pmf_exact};
use crate::montecarlo::{empirical_distribution_check, estimate_avoidance};
use crate::perm::{enumerate, LehmerWord};
use crate::{McConfig, Pattern, Result};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use std::time::Instant;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

type CheckFn = fn() -> Result<(bool, String)>;

const CHECKS: &[(&str, CheckFn)] = &[
    ("lehmer_bijection_n6", lehmer_bijection),
    ("containment_symmetries_n6", containment_symmetries),
    ("normalization_exact_n7", normalization_exact),
    ("sampler_law_exact_s5", sampler_law),
    ("duality_exact_s5", duality),
    ("catalan_at_q1_n9", catalan_at_one),
    ("recurrence_matches_oracle_n8", recurrence_oracle),
    ("ordering_and_floor_n50", ordering_and_floor),
    ("monotone_bounds_bracket", monotone_bracket),
    ("lower_bound_123_below_exact", lower_bound_below_exact),
    ("certificates_consistent", certificates_consistent),
    ("closed_forms_ordered", closed_forms_ordered),
    ("bisection_inside_closed_forms", bisection_inside),
    ("functional_equation_residual", residual),
    ("sampler_tv_s4", sampler_tv),
    ("estimate_covers_oracle", estimate_covers),
];

pub fn check_names() -> impl Iterator<Item = &'static str> {
    CHECKS.iter().map(|(n, _)| *n)
}

/// Runs every check; an `Err` from a check counts as a failure.
pub fn run_suite() -> Vec<Check> {
    CHECKS
        .iter()
        .map(|&(name, f)| {
            let start = Instant::now();
            let (passed, detail) = match f() {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            Check {
                name,
                passed,
                detail,
                seconds: start.elapsed().as_secs_f64(),
            }
        })
        .collect()
}

fn rat(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn lehmer_bijection() -> Result<(bool, String)> {
    for n in 0..=6 {
        let mut count = 0usize;
        for x in LehmerWord::all(n) {
            let p = x.decode();
            if p.lehmer() != x || p.inversions() != x.sum() {
                return Ok((false, format!("mismatch at {p}")));
            }
            count += 1;
        }
        if count != enumerate(n)?.len() {
            return Ok((false, format!("n = {n}: {count} words")));
        }
    }
    Ok((true, "n <= 6".into()))
}

fn containment_symmetries() -> Result<(bool, String)> {
    for n in 0..=6 {
        for p in enumerate(n)? {
            for t in &Pattern::S3 {
                let c = p.contains(t);
                if c != p.reverse().contains(&t.reversed())
                    || c != p.inverse().contains(&t.inverted())
                {
                    return Ok((false, format!("{p} vs {t}")));
                }
            }
        }
    }
    Ok((true, "reverse and inverse, n <= 6".into()))
}

fn normalization_exact() -> Result<(bool, String)> {
    let q = rat(1, 3);
    for n in 0..=7 {
        let mut total = BigRational::zero();
        for p in enumerate(n)? {
            total += pmf_exact(&p, &q)?;
        }
        if !total.is_one() {
            return Ok((false, format!("n = {n}: sum {total}")));
        }
    }
    Ok((true, "q = 1/3, n <= 7".into()))
}

fn sampler_law() -> Result<(bool, String)> {
    let q = rat(2, 5);
    for p in enumerate(5)? {
        let mut law = BigRational::one();
        for (i, &x) in p.lehmer().as_slice().iter().enumerate() {
            law *= truncated_geometric_pmf_exact(i + 1, x as usize, &q)?;
        }
        if law != pmf_exact(&p, &q)? {
            return Ok((false, format!("{p}")));
        }
    }
    Ok((true, "q = 2/5".into()))
}

fn duality() -> Result<(bool, String)> {
    let (q, qi) = (rat(1, 3), rat(3, 1));
    for p in enumerate(5)? {
        if pmf_exact(&p, &q)? != pmf_exact(&p.reverse(), &qi)? {
            return Ok((false, format!("{p}")));
        }
    }
    Ok((true, "q = 1/3 vs 3".into()))
}

fn catalan_at_one() -> Result<(bool, String)> {
    for n in 1..=9 {
        for poly in brute_force_numerators(n, &Pattern::S3)? {
            if poly.at_one() != catalan(n).into() {
                return Ok((false, format!("n = {n}")));
            }
        }
    }
    Ok((true, "six patterns, n <= 9".into()))
}

fn recurrence_oracle() -> Result<(bool, String)> {
    let pats = [Pattern::P312, Pattern::P231, Pattern::P213, Pattern::P132];
    let q = rat(1, 2);
    let mut worst = 0.0f64;
    for n in 1..=8 {
        let polys = brute_force_numerators(n, &pats)?;
        let z = normalizer_poly(n).eval_rational(&q);
        for (t, poly) in pats.iter().zip(&polys) {
            let p = poly.eval_rational(&q) / &z;
            if avoidance_recurrence_exact(n, &q, t)?[n] != p {
                return Ok((false, format!("{t} n = {n} exact")));
            }
            let pf = p.to_f64().unwrap_or(f64::NAN);
            let got = avoidance_recurrence(n, 0.5, t)?.d(n).to_f64();
            worst = worst.max((got - pf).abs() / pf);
        }
    }
    Ok((worst <= 1e-12, format!("max rel err {worst:.2e}")))
}

fn ordering_and_floor() -> Result<(bool, String)> {
    for q in [0.3, 0.5, 0.7] {
        let [s312, s231, s213, s132] = [Pattern::P312, Pattern::P231, Pattern::P213, Pattern::P132]
            .map(|t| avoidance_recurrence(50, q, &t));
        let (s312, s231, s213, s132) = (s312?, s231?, s213?, s132?);
        let floor = (1.0 - q).ln();
        for n in 3..=50 {
            let (a, b) = (s312.d(n).ln(), s231.d(n).ln());
            let (c, d) = (s213.d(n).ln(), s132.d(n).ln());
            let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * x.abs().max(1.0);
            if !close(a, b) || !close(c, d) || a <= c || c <= n as f64 * floor {
                return Ok((false, format!("q = {q}, n = {n}")));
            }
        }
    }
    Ok((true, "3 <= n <= 50".into()))
}

fn monotone_bracket() -> Result<(bool, String)> {
    for q in [0.3, 0.5, 0.7] {
        for mask in 1u32..(1 << 8) {
            let idx: Vec<usize> = (0..8)
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| b + 1)
                .collect();
            if idx.len() > 4 {
                continue;
            }
            let p = monotone_x_probability(&idx, q)?;
            let (lo, hi) = monotone_x_bounds(idx.len(), q)?;
            if !(lo <= p * (1.0 + 1e-12) && p <= hi * (1.0 + 1e-12)) {
                return Ok((false, format!("q = {q}, {idx:?}: {lo} {p} {hi}")));
            }
        }
    }
    Ok((true, "m <= 4, i_m <= 8".into()))
}

fn lower_bound_below_exact() -> Result<(bool, String)> {
    let q = 0.5;
    for n in 1..=8 {
        let poly = &brute_force_numerators(n, &[Pattern::P123])?[0];
        let exact = poly.eval_f64(q) / normalizer_poly(n).eval_f64(q);
        if lower_bound_123(n, q)?.to_f64() > exact {
            return Ok((false, format!("n = {n}")));
        }
    }
    Ok((true, "n <= 8".into()))
}

fn certificates_consistent() -> Result<(bool, String)> {
    for qi in 1..=9 {
        let q = qi as f64 / 10.0;
        let (mut lower, mut upper) = (f64::NEG_INFINITY, f64::INFINITY);
        for ci in 1..20 {
            let c = ci as f64 / 20.0;
            if iterated_lower_condition(c, q, 32)?.is_infinite() {
                lower = lower.max((1.0 - q) / c);
            }
            if iterated_upper_condition(c, q, 32)?.is_finite() {
                upper = upper.min((1.0 - q) / c);
            }
        }
        if lower >= upper {
            return Ok((false, format!("q = {q}: {lower} >= {upper}")));
        }
    }
    Ok((true, "grid of 9 x 19".into()))
}

fn closed_forms_ordered() -> Result<(bool, String)> {
    for i in 1..100 {
        let q = i as f64 / 100.0;
        let b = closed_form_bounds(q)?;
        if b.lb >= b.ub || (q <= 0.5 && b.ub - b.lb >= 0.01) {
            return Ok((false, format!("q = {q}: {b:?}")));
        }
    }
    Ok((true, "q on a 0.01 grid".into()))
}

fn bisection_inside() -> Result<(bool, String)> {
    for i in 1..=9 {
        let q = i as f64 / 10.0;
        let br = limit_312(q, 0.01, DEFAULT_DEPTH_CAP)?;
        let b = closed_form_bounds(q)?;
        if br.lo < b.lb || br.hi > b.ub || br.width() > 0.01 {
            return Ok((false, format!("q = {q}: {br:?}")));
        }
    }
    Ok((true, "eps = 0.01".into()))
}

fn residual() -> Result<(bool, String)> {
    let r = functional_equation_residual(0.5, 0.5, 400)?;
    Ok((r < 1e-8, format!("{r:.2e} at q = t = 0.5")))
}

fn sampler_tv() -> Result<(bool, String)> {
    let tv = empirical_distribution_check(4, 0.5, &McConfig::new(200_000, 1))?;
    Ok((tv < 0.01, format!("tv {tv:.4} with 2e5 draws")))
}

fn estimate_covers() -> Result<(bool, String)> {
    let exact = avoidance_recurrence(6, 0.5, &Pattern::P312)?.d(6).to_f64();
    let est = estimate_avoidance(6, 0.5, &Pattern::P312, &McConfig::new(100_000, 3))?;
    let ok = (est.mean - exact).abs() <= 4.0 * est.stderr;
    Ok((ok, format!("{:.5} vs {exact:.5}", est.mean)))
}
