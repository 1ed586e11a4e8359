//! Parsing of q values, q grids and patterns, and the q > 1 reduction.

use mallows_core::{BigRational, Pattern};
use num_traits::{One, ToPrimitive, Zero};
use std::fmt;

#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A q value given on the command line, kept exactly as typed.
#[derive(Clone, Debug, PartialEq)]
pub struct QValue {
    pub text: String,
    pub exact: BigRational,
    pub value: f64,
}

/// Parses `0.25`, `1/3`, `2` or `1e-3` into an exact rational.
pub fn parse_q(s: &str) -> Result<QValue, UsageError> {
    let bad = || UsageError(format!("invalid q value '{s}'"));
    let t = s.trim();
    let exact = if t.contains('/') {
        t.parse::<BigRational>().map_err(|_| bad())?
    } else {
        let v: f64 = t.parse().map_err(|_| bad())?;
        decimal_to_rational(t)
            .or_else(|| BigRational::from_float(v))
            .ok_or_else(bad)?
    };
    if exact <= BigRational::zero() {
        return Err(UsageError(format!("q must be positive, got {s}")));
    }
    let value = exact.to_f64().ok_or_else(bad)?;
    if !(value.is_finite() && value > 0.0) {
        return Err(bad());
    }
    Ok(QValue {
        text: t.to_string(),
        exact,
        value,
    })
}

fn decimal_to_rational(t: &str) -> Option<BigRational> {
    if t.contains(['e', 'E']) {
        return None;
    }
    let (int, frac) = t.split_once('.').unwrap_or((t, ""));
    let digits = format!("{int}{frac}");
    let den = format!("1{}", "0".repeat(frac.len()));
    format!("{}/{den}", if digits.is_empty() { "0" } else { &digits })
        .parse()
        .ok()
}

impl QValue {
    pub fn from_f64(v: f64) -> Self {
        Self {
            text: format_q(v),
            exact: BigRational::from_float(v).unwrap_or_else(BigRational::zero),
            value: v,
        }
    }

    pub fn is_one(&self) -> bool {
        self.exact.is_one()
    }
}

/// Prints grid points without binary noise (`0.30000000000000004` → `0.3`).
pub fn format_q(v: f64) -> String {
    let r: f64 = format!("{v:.12}").parse().unwrap_or(v);
    format!("{r}")
}

/// Parses `start:stop:step` into the points `start, start+step, …, <= stop`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, UsageError> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = |why: &str| UsageError(format!("invalid q grid '{s}': {why}"));
    if parts.len() != 3 {
        return Err(bad("expected start:stop:step"));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad("not a number"))?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0 && step.is_finite()) {
        return Err(bad("step must be positive"));
    }
    if !(start.is_finite() && stop.is_finite()) || stop < start {
        return Err(bad("need start <= stop"));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(bad("more than 10^6 points"));
    }
    Ok((0..count)
        .map(|i| format_q(start + i as f64 * step).parse().unwrap())
        .collect())
}

/// Either `--q` or `--q-grid`, falling back to `default_grid`.
pub fn q_values(
    q: Option<&str>,
    grid: Option<&str>,
    default_grid: &str,
) -> Result<Vec<QValue>, UsageError> {
    match (q, grid) {
        (Some(_), Some(_)) => Err(UsageError("give --q or --q-grid, not both".into())),
        (Some(q), None) => Ok(vec![parse_q(q)?]),
        (None, g) => Ok(parse_grid(g.unwrap_or(default_grid))?
            .into_iter()
            .map(QValue::from_f64)
            .collect()),
    }
}

/// For commands defined only on the open unit interval.
pub fn require_unit(q: &QValue, what: &str) -> Result<f64, UsageError> {
    if q.value > 0.0 && q.value < 1.0 {
        Ok(q.value)
    } else {
        Err(UsageError(format!(
            "{what} needs q in (0, 1), got {}",
            q.text
        )))
    }
}

pub fn parse_pattern(s: &str) -> Result<Pattern, UsageError> {
    s.parse::<Pattern>()
        .map_err(|e| UsageError(format!("invalid pattern '{s}': {e}")))
}

/// How a pattern command was evaluated.
#[derive(Clone, Debug)]
pub struct Reduced {
    pub q: QValue,
    pub pattern: Pattern,
    pub kind: &'static str,
}

/// `P^q(S_n(τ)) = P^{1/q}(S_n(τ^rev))` for `q > 1`.
pub fn reduce(q: &QValue, pattern: &Pattern) -> Reduced {
    if q.is_one() {
        Reduced {
            q: q.clone(),
            pattern: pattern.clone(),
            kind: "uniform",
        }
    } else if q.exact > BigRational::one() {
        let exact = q.exact.recip();
        let value = exact.to_f64().unwrap_or(1.0 / q.value);
        let text = if q.text.contains('/') || exact.denom().to_string().len() > 12 {
            exact.to_string()
        } else {
            format_q(value)
        };
        Reduced {
            q: QValue { text, exact, value },
            pattern: pattern.reversed(),
            kind: "dual",
        }
    } else {
        Reduced {
            q: q.clone(),
            pattern: pattern.clone(),
            kind: "direct",
        }
    }
}

impl Reduced {
    pub fn note(&self, original: &QValue, pattern: &Pattern) -> Option<String> {
        (self.kind == "dual").then(|| {
            format!(
                "q = {} > 1: evaluated at q = {} with reversed pattern {} in place of {}",
                original.text, self.q.text, self.pattern, pattern
            )
        })
    }
}
