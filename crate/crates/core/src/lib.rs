//! Probabilities that a Mallows(q) random permutation avoids a pattern of
//! length three: exact enumeration, convolution recurrences, generating-function
//! certificates for the 312/231 growth rate, and seeded Monte Carlo.

pub mod error;
pub mod exact;
pub mod genfunc;
pub mod logreal;
pub mod mallows;
pub mod montecarlo;
pub mod perm;
pub mod qpoly;
pub mod verify;

pub use error::{Error, Result};
pub use exact::{AvoidanceSeries, BruteForce, RecurrenceFamily};
pub use genfunc::{BoundReport, ClosedFormBounds, ExtendedReal, LimitBracket};
pub use logreal::LogReal;
pub use mallows::{MallowsParam, Reduction, SamplerState};
pub use montecarlo::{Estimate, McConfig};
pub use perm::{LehmerWord, Pattern, Permutation};
pub use qpoly::QPolynomial;

pub use num_rational::BigRational;
