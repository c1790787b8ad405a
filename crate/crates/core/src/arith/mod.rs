//! Exact arithmetic in radical towers over rational function fields.
//!
//! A [`Tower`] is the field `Q(x0, x1, ...)(y0)(y1)...` where every `x` is a
//! transcendental generator and every `y` satisfies `y^q = c` for an odd prime
//! `q` and a radicand `c` from the part of the tower built before it.
//! [`FieldElement`]s are kept in a canonical normal form, so field equality
//! is structural equality.

mod element;
pub mod expr;
pub mod gcd;
pub mod poly;
mod power;
mod q;
pub mod ratfn;
mod tower;

use thiserror::Error;

pub use element::{FieldElement, Rep};
pub use poly::{Monomial, Poly, Var};
pub use power::qth_power_test;
pub use ratfn::RatFn;
pub use tower::{Generator, GeneratorKind, Tower};

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("elements belong to different towers")]
    TowerMismatch,
    #[error("radicand is zero")]
    DegenerateRadicand,
    #[error("radicand of `{0}` is a q-th power, so the relation is reducible")]
    ReducibleRelation(String),
    #[error("duplicate generator label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown generator label `{0}`")]
    UnknownLabel(String),
    #[error("`{0}` is not a transcendental generator")]
    NotTranscendental(String),
    #[error("denominator vanishes when substituting for `{0}`")]
    SubstitutionSingularity(String),
    #[error("radical exponent {0} is not a prime >= 5")]
    InvalidExponent(u32),
    #[error("q-th power test is only implemented for radicands in the base field")]
    UnsupportedRadicand,
    #[error("expression parse error: {0}")]
    Parse(String),
}
