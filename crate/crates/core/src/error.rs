use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A size guard was exceeded (enumeration, brute force, exact mode, DP).
    #[error("resource limit: {what} = {value} exceeds the limit {limit}")]
    ResourceLimit {
        what: &'static str,
        value: u64,
        limit: u64,
    },
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn guard(what: &'static str, value: u64, limit: u64) -> Result<()> {
    if value > limit {
        Err(Error::ResourceLimit { what, value, limit })
    } else {
        Ok(())
    }
}

/// Checks that `q` is a finite real in the open interval (0, 1).
pub(crate) fn check_unit_q(q: f64) -> Result<()> {
    if q.is_finite() && q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("q must lie in (0, 1), got {q}")))
    }
}
