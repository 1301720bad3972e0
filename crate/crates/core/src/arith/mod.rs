//! Exact arithmetic: rationals, sparse multivariate polynomials, rational
//! functions and the coprime letter registry used for symbol entries.

pub mod parse;
pub mod poly;
pub mod ratfunc;
pub mod registry;

use thiserror::Error;

pub use num_rational::BigRational as BigRat;
pub use parse::{parse_poly, parse_rational, parse_ratfunc};
pub use poly::{Monomial, MultiPoly, VarValue};
pub use ratfunc::RatFunc;
pub use registry::{FactoredValue, Letter, LetterRegistry};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("denominator vanishes at the given point")]
    PoleAtPoint,
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("cannot factor the zero function")]
    ZeroInput,
    #[error("parse error: {0}")]
    Parse(String),
}

/// Formats a rational as `n` or `n/d`.
pub fn rat_to_string(q: &BigRat) -> String {
    q.to_string()
}

pub fn rat(n: i64, d: i64) -> BigRat {
    BigRat::new(n.into(), d.into())
}

pub fn int(n: i64) -> BigRat {
    BigRat::from_integer(n.into())
}
