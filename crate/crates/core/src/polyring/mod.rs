//! Exact arithmetic: rationals, multivariate polynomials, truncated power series.

mod jet;
mod parse;
mod polynomial;
pub mod rational;

pub use jet::Jet;
pub use parse::{parse_polynomial, ParseError, ParseErrorKind};
pub use polynomial::{Monomial, Polynomial, Roster};
pub use rational::Rational;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("roster mismatch: {left} vs {right}")]
    RosterMismatch { left: String, right: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` listed twice")]
    DuplicateVariable(String),
    #[error("zero polynomial has no monomial content")]
    ZeroPolynomial,
    #[error("jet has zero constant term and is not a unit")]
    NotAUnit,
    #[error("unit must have constant term 1, found {0}")]
    NotNormalizedUnit(String),
    #[error("exp requires a zero constant term")]
    NonzeroConstant,
    #[error("jet orders differ: {0} vs {1}")]
    OrderMismatch(u32, u32),
    #[error(transparent)]
    Parse(#[from] ParseError),
}
