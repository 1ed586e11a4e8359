//! Nonnegative reals carried as natural logarithms.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul};

/// A nonnegative real stored as `ln x`; zero is `-∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogReal {
    ln: f64,
}

impl LogReal {
    pub const ZERO: LogReal = LogReal {
        ln: f64::NEG_INFINITY,
    };
    pub const ONE: LogReal = LogReal { ln: 0.0 };

    /// Panics on negative or NaN input.
    pub fn new(x: f64) -> Self {
        assert!(x >= 0.0, "LogReal requires a nonnegative value, got {x}");
        Self { ln: x.ln() }
    }

    pub fn from_ln(ln: f64) -> Self {
        assert!(!ln.is_nan(), "LogReal logarithm is NaN");
        Self { ln }
    }

    pub fn ln(self) -> f64 {
        self.ln
    }

    pub fn to_f64(self) -> f64 {
        self.ln.exp()
    }

    pub fn is_zero(self) -> bool {
        self.ln == f64::NEG_INFINITY
    }

    pub fn powf(self, e: f64) -> Self {
        if self.is_zero() {
            return if e == 0.0 { Self::ONE } else { Self::ZERO };
        }
        Self { ln: self.ln * e }
    }

    /// Stable `Σ x_i`.
    pub fn sum<I: IntoIterator<Item = LogReal>>(items: I) -> Self {
        log_sum_exp(items.into_iter().map(|x| x.ln))
    }
}

/// `ln Σ exp(v_i)` in one pass, rescaling whenever the running maximum grows.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(values: I) -> LogReal {
    let mut max = f64::NEG_INFINITY;
    let mut acc = 0.0f64;
    for v in values {
        if v == f64::NEG_INFINITY {
            continue;
        }
        if v <= max {
            acc += (v - max).exp();
        } else {
            acc = acc * (max - v).exp() + 1.0;
            max = v;
        }
    }
    if max == f64::NEG_INFINITY {
        LogReal::ZERO
    } else {
        LogReal { ln: max + acc.ln() }
    }
}

impl Mul for LogReal {
    type Output = LogReal;

    fn mul(self, rhs: LogReal) -> LogReal {
        if self.is_zero() || rhs.is_zero() {
            return LogReal::ZERO;
        }
        LogReal {
            ln: self.ln + rhs.ln,
        }
    }
}

impl Div for LogReal {
    type Output = LogReal;

    fn div(self, rhs: LogReal) -> LogReal {
        assert!(!rhs.is_zero(), "LogReal division by zero");
        if self.is_zero() {
            return LogReal::ZERO;
        }
        LogReal {
            ln: self.ln - rhs.ln,
        }
    }
}

impl Add for LogReal {
    type Output = LogReal;

    fn add(self, rhs: LogReal) -> LogReal {
        let (hi, lo) = if self.ln >= rhs.ln {
            (self.ln, rhs.ln)
        } else {
            (rhs.ln, self.ln)
        };
        if lo == f64::NEG_INFINITY {
            return LogReal { ln: hi };
        }
        LogReal {
            ln: hi + (lo - hi).exp().ln_1p(),
        }
    }
}

impl PartialOrd for LogReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.ln.partial_cmp(&other.ln)
    }
}
