use crate::params::{parse_pattern, q_values, reduce, require_unit, QValue, UsageError};
use mallows_core::exact::{
    avoidance_recurrence, avoidance_recurrence_exact, brute_force_avoidance,
    uniform_avoidance_exact, MAX_EXACT_RECURRENCE_N,
};
use mallows_core::genfunc::limit_312;
use mallows_core::mallows::RNG_ID;
use mallows_core::montecarlo::estimate_avoidance;
use mallows_core::verify::run_suite;
use mallows_core::{
    BoundReport, Error as CoreError, MallowsParam, McConfig, Pattern, SamplerState,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use std::io::{self, Write};

pub const MAX_RECURRENCE_N: usize = 100_000;
pub const MAX_SAMPLE_ENTRIES: u64 = 100_000_000;
pub const MAX_ESTIMATE_N: usize = 1_000_000;

#[derive(Debug)]
pub enum CmdError {
    Usage(String),
    Core(CoreError),
    Io(io::Error),
    VerifyFailed(usize),
}

impl From<UsageError> for CmdError {
    fn from(e: UsageError) -> Self {
        CmdError::Usage(e.0)
    }
}

impl From<CoreError> for CmdError {
    fn from(e: CoreError) -> Self {
        CmdError::Core(e)
    }
}

impl From<io::Error> for CmdError {
    fn from(e: io::Error) -> Self {
        CmdError::Io(e)
    }
}

impl From<csv::Error> for CmdError {
    fn from(e: csv::Error) -> Self {
        CmdError::Io(e.into())
    }
}

impl From<serde_json::Error> for CmdError {
    fn from(e: serde_json::Error) -> Self {
        CmdError::Io(e.into())
    }
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Usage(_) => 1,
            CmdError::Core(CoreError::ResourceLimit { .. }) => 3,
            CmdError::Core(_) => 1,
            CmdError::Io(_) => 1,
            CmdError::VerifyFailed(_) => 2,
        }
    }
}

impl std::fmt::Display for CmdError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CmdError::Usage(m) => write!(f, "usage error: {m}"),
            CmdError::Core(CoreError::ResourceLimit { what, value, limit }) => {
                write!(f, "resource limit: {what} = {value} exceeds {limit}")
            }
            CmdError::Core(e) => write!(f, "error: {e}"),
            CmdError::Io(e) => write!(f, "io error: {e}"),
            CmdError::VerifyFailed(k) => write!(f, "verification failed: {k} check(s)"),
        }
    }
}

pub type CmdResult = Result<(), CmdError>;

fn limit_error(what: &'static str, value: u64, limit: u64) -> CmdResult {
    if value > limit {
        Err(CmdError::Core(CoreError::ResourceLimit {
            what,
            value,
            limit,
        }))
    } else {
        Ok(())
    }
}

fn schema_line(out: &mut dyn Write, name: &str) -> io::Result<()> {
    writeln!(out, "# schema: mallows-{name}/v1")
}

fn emit_json(out: &mut dyn Write, value: &impl Serialize) -> CmdResult {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn reduction_json(r: &crate::params::Reduced, q: &QValue, pattern: &Pattern) -> serde_json::Value {
    json!({
        "kind": r.kind,
        "q": r.q.value,
        "pattern": r.pattern.to_string(),
        "note": r.note(q, pattern),
    })
}

pub struct ExactArgs<'a> {
    pub n: usize,
    pub pattern: &'a str,
    pub q: &'a str,
    pub rational: bool,
    pub json: bool,
}

pub fn exact(a: ExactArgs<'_>, out: &mut dyn Write) -> CmdResult {
    let pattern = parse_pattern(a.pattern)?;
    let q = crate::params::parse_q(a.q)?;
    let red = reduce(&q, &pattern);
    let bf = brute_force_avoidance(a.n, &red.pattern)?;
    let p_exact = bf.probability_exact(&red.q.exact);
    let probability = num_traits::ToPrimitive::to_f64(&p_exact).unwrap_or(f64::NAN);
    let exact = if red.kind == "uniform" {
        Some(format!(
            "{}/{}",
            bf.numerator.at_one(),
            bf.normalizer.at_one()
        ))
    } else if a.rational {
        Some(p_exact.to_string())
    } else {
        None
    };
    if a.json {
        return emit_json(
            out,
            &json!({
                "schema": "mallows-exact/v1",
                "n": a.n,
                "pattern": pattern.to_string(),
                "q": q.value,
                "reduction": reduction_json(&red, &q, &pattern),
                "probability": probability,
                "exact": exact,
                "numerator": bf.numerator.to_decimal_strings(),
                "normalizer": bf.normalizer.to_decimal_strings(),
            }),
        );
    }
    schema_line(out, "exact")?;
    if let Some(note) = red.note(&q, &pattern) {
        writeln!(out, "# {note}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "n",
        "pattern",
        "q",
        "reduction",
        "probability",
        "exact",
        "numerator",
    ])?;
    w.write_record([
        a.n.to_string(),
        pattern.to_string(),
        q.text.clone(),
        red.kind.to_string(),
        probability.to_string(),
        exact.unwrap_or_default(),
        bf.numerator.to_string(),
    ])?;
    w.flush()?;
    Ok(())
}

pub struct RecurArgs<'a> {
    pub n: usize,
    pub pattern: &'a str,
    pub q: &'a str,
    pub rational: bool,
    pub json: bool,
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `ln(C_n / n!)` without forming either number.
fn ln_uniform_avoidance(n: usize) -> f64 {
    ln_factorial(2 * n) - 2.0 * ln_factorial(n) - ((n + 1) as f64).ln() - ln_factorial(n)
}

pub fn recur(a: RecurArgs<'_>, out: &mut dyn Write) -> CmdResult {
    let pattern = parse_pattern(a.pattern)?;
    let q = crate::params::parse_q(a.q)?;
    if pattern.len() != 3 {
        return Err(CmdError::Usage(
            "recur takes a pattern of length three".into(),
        ));
    }
    limit_error("recurrence n", a.n as u64, MAX_RECURRENCE_N as u64)?;
    if a.rational {
        limit_error(
            "exact recurrence n",
            a.n as u64,
            MAX_EXACT_RECURRENCE_N as u64,
        )?;
    }
    let red = reduce(&q, &pattern);
    let ln_d: Vec<f64> = if red.kind == "uniform" {
        (0..=a.n).map(ln_uniform_avoidance).collect()
    } else {
        let s = avoidance_recurrence(a.n, red.q.value, &red.pattern)?;
        (0..=a.n).map(|n| s.d(n).ln()).collect()
    };
    let exact: Option<Vec<String>> = if !a.rational {
        None
    } else if red.kind == "uniform" {
        Some(
            (0..=a.n)
                .map(|n| uniform_avoidance_exact(n).to_string())
                .collect(),
        )
    } else {
        let d = avoidance_recurrence_exact(a.n, &red.q.exact, &red.pattern)?;
        Some(d.iter().map(|x| x.to_string()).collect())
    };
    let rows: Vec<(usize, f64, f64, f64)> = (1..=a.n)
        .map(|n| (n, ln_d[n].exp(), ln_d[n], (ln_d[n] / n as f64).exp()))
        .collect();
    if a.json {
        let rows: Vec<_> = rows
            .iter()
            .map(|&(n, d, l, r)| {
                json!({
                    "n": n, "d_n": d, "log_d_n": l, "d_n_root": r,
                    "d_n_exact": exact.as_ref().map(|e| e[n].clone()),
                })
            })
            .collect();
        return emit_json(
            out,
            &json!({
                "schema": "mallows-recur/v1",
                "pattern": pattern.to_string(),
                "q": q.value,
                "reduction": reduction_json(&red, &q, &pattern),
                "rows": rows,
            }),
        );
    }
    schema_line(out, "recur")?;
    if let Some(note) = red.note(&q, &pattern) {
        writeln!(out, "# {note}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["n", "d_n", "log_d_n", "d_n_root"];
    if exact.is_some() {
        header.push("d_n_exact");
    }
    w.write_record(&header)?;
    for &(n, d, l, r) in &rows {
        let mut rec = vec![n.to_string(), d.to_string(), l.to_string(), r.to_string()];
        if let Some(e) = &exact {
            rec.push(e[n].clone());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub struct GridArgs<'a> {
    pub q: Option<&'a str>,
    pub q_grid: Option<&'a str>,
    pub eps: f64,
    pub depth_cap: usize,
    pub json: bool,
}

fn reports(
    a: &GridArgs<'_>,
    default_grid: &str,
    what: &str,
) -> Result<Vec<(QValue, BoundReport)>, CmdError> {
    if !(a.eps > 0.0 && a.eps.is_finite()) {
        return Err(CmdError::Usage(format!(
            "--eps must be positive, got {}",
            a.eps
        )));
    }
    if a.depth_cap == 0 {
        return Err(CmdError::Usage("--depth-cap must be at least 1".into()));
    }
    let qs = q_values(a.q, a.q_grid, default_grid)?;
    for q in &qs {
        require_unit(q, what)?;
    }
    let reports: Vec<_> = qs
        .par_iter()
        .map(|q| BoundReport::compute(q.value, a.eps, a.depth_cap))
        .collect::<Result<_, _>>()?;
    Ok(qs.into_iter().zip(reports).collect())
}

pub fn bounds(a: GridArgs<'_>, out: &mut dyn Write) -> CmdResult {
    let rows = reports(&a, "0.1:0.9:0.1", "bounds")?;
    if a.json {
        let rows: Vec<_> = rows
            .iter()
            .map(|(q, r)| {
                json!({
                    "q": q.value, "lb": r.lb_closed, "ub": r.ub_closed, "catalan_ub": r.catalan_ub,
                    "bisect_lo": r.interval.lo, "bisect_hi": r.interval.hi,
                    "depth_used": r.interval.depth_used, "flagged": r.interval.flagged,
                })
            })
            .collect();
        return emit_json(
            out,
            &json!({"schema": "mallows-bounds/v1", "eps": a.eps, "rows": rows}),
        );
    }
    schema_line(out, "bounds")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "q",
        "LB",
        "UB",
        "catalan_ub",
        "bisect_lo",
        "bisect_hi",
        "depth_used",
        "flagged",
    ])?;
    for (q, r) in &rows {
        w.write_record([
            q.text.clone(),
            r.lb_closed.to_string(),
            r.ub_closed.to_string(),
            r.catalan_ub.to_string(),
            r.interval.lo.to_string(),
            r.interval.hi.to_string(),
            r.interval.depth_used.to_string(),
            r.interval.flagged.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn limit(a: GridArgs<'_>, out: &mut dyn Write) -> CmdResult {
    if a.q.is_none() && a.q_grid.is_none() {
        return Err(CmdError::Usage("limit needs --q or --q-grid".into()));
    }
    let qs = q_values(a.q, a.q_grid, "")?;
    for q in &qs {
        require_unit(q, "limit")?;
    }
    let computed: Vec<_> = qs
        .par_iter()
        .map(|q| limit_312(q.value, a.eps, a.depth_cap))
        .collect::<Result<Vec<_>, _>>()?;
    let brs: Vec<_> = qs.iter().zip(computed).collect();
    if a.json {
        let rows: Vec<_> = brs
            .iter()
            .map(|(q, b)| {
                json!({
                    "q": q.value, "eps": a.eps, "lo": b.lo, "hi": b.hi, "mid": b.mid(),
                    "width": b.width(), "depth_used": b.depth_used, "flagged": b.flagged,
                })
            })
            .collect();
        return emit_json(out, &json!({"schema": "mallows-limit/v1", "rows": rows}));
    }
    schema_line(out, "limit")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "q",
        "eps",
        "lo",
        "hi",
        "mid",
        "width",
        "depth_used",
        "flagged",
    ])?;
    for (q, b) in &brs {
        w.write_record([
            q.text.clone(),
            a.eps.to_string(),
            b.lo.to_string(),
            b.hi.to_string(),
            b.mid().to_string(),
            b.width().to_string(),
            b.depth_used.to_string(),
            b.flagged.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub struct SampleArgs<'a> {
    pub n: usize,
    pub q: &'a str,
    pub seed: u64,
    pub count: u64,
    pub json: bool,
}

pub fn sample(a: SampleArgs<'_>, out: &mut dyn Write) -> CmdResult {
    let q = crate::params::parse_q(a.q)?;
    limit_error(
        "sample entries",
        (a.n as u64).saturating_mul(a.count),
        MAX_SAMPLE_ENTRIES,
    )?;
    let param = MallowsParam::new(q.value)?;
    let kind = match param.reduction() {
        mallows_core::Reduction::Direct(_) => "direct",
        mallows_core::Reduction::Uniform => "uniform",
        mallows_core::Reduction::Dual(_) => "dual",
    };
    let mut st = SamplerState::new(a.seed);
    let perms: Vec<_> = (0..a.count).map(|_| param.sample(a.n, &mut st)).collect();
    if a.json {
        let words: Vec<&[u32]> = perms.iter().map(|p| p.as_slice()).collect();
        return emit_json(
            out,
            &json!({
                "schema": "mallows-sample/v1",
                "seed": a.seed, "q": q.value, "n": a.n, "rng_id": RNG_ID,
                "reduction": kind, "permutations": words,
            }),
        );
    }
    schema_line(out, "sample")?;
    writeln!(
        out,
        "# seed={} q={} n={} rng_id={RNG_ID} reduction={kind}",
        a.seed, q.text, a.n
    )?;
    for p in &perms {
        let line: Vec<String> = p.as_slice().iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

pub struct EstimateArgs<'a> {
    pub n: usize,
    pub q: &'a str,
    pub pattern: &'a str,
    pub samples: u64,
    pub seed: u64,
    pub shards: usize,
    pub json: bool,
}

pub fn estimate(a: EstimateArgs<'_>, out: &mut dyn Write) -> CmdResult {
    let pattern = parse_pattern(a.pattern)?;
    let q = crate::params::parse_q(a.q)?;
    limit_error("estimate n", a.n as u64, MAX_ESTIMATE_N as u64)?;
    let red = reduce(&q, &pattern);
    let cfg = McConfig::new(a.samples, a.seed).with_shards(a.shards);
    let e = estimate_avoidance(a.n, red.q.value, &red.pattern, &cfg)?;
    if a.json {
        return emit_json(
            out,
            &json!({
                "schema": "mallows-estimate/v1",
                "n": a.n, "q": q.value, "pattern": pattern.to_string(),
                "samples": e.samples, "seed": e.seed, "shards": a.shards, "hits": e.hits,
                "mean": e.mean, "stderr": e.stderr, "ci95": [e.ci95.0, e.ci95.1],
                "flagged_rare": e.flagged_rare, "rng_id": RNG_ID,
                "reduction": reduction_json(&red, &q, &pattern),
            }),
        );
    }
    schema_line(out, "estimate")?;
    if let Some(note) = red.note(&q, &pattern) {
        writeln!(out, "# {note}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "n",
        "q",
        "pattern",
        "samples",
        "seed",
        "hits",
        "mean",
        "stderr",
        "ci95_lo",
        "ci95_hi",
        "flagged_rare",
    ])?;
    w.write_record([
        a.n.to_string(),
        q.text.clone(),
        pattern.to_string(),
        e.samples.to_string(),
        e.seed.to_string(),
        e.hits.to_string(),
        e.mean.to_string(),
        e.stderr.to_string(),
        e.ci95.0.to_string(),
        e.ci95.1.to_string(),
        e.flagged_rare.to_string(),
    ])?;
    w.flush()?;
    Ok(())
}

/// `0.806` → `.806`.
fn three_places(x: f64) -> String {
    let s = format!("{x:.3}");
    s.strip_prefix('0').map(str::to_string).unwrap_or(s)
}

pub fn table(a: GridArgs<'_>, out: &mut dyn Write) -> CmdResult {
    let rows = reports(&a, "0.1:0.9:0.1", "table")?;
    if a.json {
        let cols: Vec<_> = rows
            .iter()
            .map(|(q, r)| {
                let b = r.interval;
                json!({
                    "q": q.value, "ub": r.ub_closed, "lb": r.lb_closed,
                    "true_lo": b.lo, "true_hi": b.hi, "true_mid": b.mid(),
                    "true_half_width": b.width() / 2.0, "flagged": b.flagged,
                })
            })
            .collect();
        return emit_json(
            out,
            &json!({"schema": "mallows-table/v1", "eps": a.eps, "columns": cols}),
        );
    }
    let label = |s: &str| format!("{s:<22}");
    let cell = |s: String| format!("{s:>12}");
    let mut lines = [
        label("q"),
        label("UB(q)"),
        label("LB(q)"),
        label(&format!("true value (eps {})", a.eps)),
    ];
    for (q, r) in &rows {
        let b = r.interval;
        let flag = if b.flagged { "*" } else { "" };
        lines[0] += &cell(three_places(q.value).trim_end_matches('0').to_string());
        lines[1] += &cell(three_places(r.ub_closed));
        lines[2] += &cell(three_places(r.lb_closed));
        lines[3] += &cell(format!(
            "{}±{}{flag}",
            three_places(b.mid()),
            three_places(b.width() / 2.0)
        ));
    }
    for l in &lines {
        writeln!(out, "{}", l.trim_end())?;
    }
    if rows.iter().any(|(_, r)| r.interval.flagged) {
        writeln!(out, "* bisection stopped at an undecided point")?;
    }
    Ok(())
}

pub fn plotdata(a: GridArgs<'_>, out: &mut dyn Write) -> CmdResult {
    let rows = reports(&a, "0.01:0.99:0.01", "plotdata")?;
    type Curve = (&'static str, fn(&BoundReport) -> f64);
    let curves: [Curve; 3] = [
        ("LB", |r| r.lb_closed),
        ("UB", |r| r.ub_closed),
        ("bisect_mid", |r| r.interval.mid()),
    ];
    if a.json {
        let points: Vec<_> = curves
            .iter()
            .flat_map(|(name, f)| {
                rows.iter()
                    .map(move |(q, r)| json!({"curve": name, "q": q.value, "value": f(r)}))
            })
            .collect();
        return emit_json(
            out,
            &json!({"schema": "mallows-plotdata/v1", "eps": a.eps, "points": points}),
        );
    }
    schema_line(out, "plotdata")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["curve", "q", "value"])?;
    for (name, f) in &curves {
        for (q, r) in &rows {
            w.write_record([name.to_string(), q.text.clone(), f(r).to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn verify(json_out: bool, out: &mut dyn Write) -> CmdResult {
    let checks = run_suite();
    let failed = checks.iter().filter(|c| !c.passed).count();
    if json_out {
        emit_json(
            out,
            &json!({"schema": "mallows-verify/v1", "passed": failed == 0, "checks": checks}),
        )?;
    } else {
        for c in &checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(out, "{tag} {} ({:.2}s): {}", c.name, c.seconds, c.detail)?;
        }
        writeln!(
            out,
            "{} of {} checks passed",
            checks.len() - failed,
            checks.len()
        )?;
    }
    if failed > 0 {
        return Err(CmdError::VerifyFailed(failed));
    }
    Ok(())
}
