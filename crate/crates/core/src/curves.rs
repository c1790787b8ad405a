//! Fermat curves `X^q + Y^q - 1` over a sparse sequence of primes.

use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use num_bigint::BigInt;
use thiserror::Error;

use crate::arith::{ArithError, FieldElement, Monomial, Poly, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("(x, y) has a zero coordinate")]
    TrivialSolution,
    #[error("point is not on the curve")]
    NotOnCurve,
    #[error("prime q{0} needs --allow-slow")]
    SlowSearchRequired(usize),
    #[error("prime q{0} is beyond 64-bit range")]
    OutOfRange(usize),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Which prime sequence indexes the family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Policy {
    /// `q0 = 5`, `q(i+1)` the least prime above `(4(q-1)(q-2))^2`.
    #[default]
    Paper,
    /// All primes from 5 upward.
    Toy,
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::Paper => "paper",
            Policy::Toy => "toy",
        })
    }
}

impl FromStr for Policy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "paper" => Ok(Policy::Paper),
            "toy" => Ok(Policy::Toy),
            other => Err(format!("unknown policy `{other}`")),
        }
    }
}

/// Trial division; the 2-3-5 wheel skips all multiples of 2, 3 and 5.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2, 3, 5] {
        if n % p == 0 {
            return n == p;
        }
    }
    const STEPS: [u64; 8] = [4, 2, 4, 2, 4, 6, 2, 6];
    let mut d: u64 = 7;
    let mut k = 0;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += STEPS[k];
        k = (k + 1) % 8;
    }
    true
}

pub fn least_prime_above(bound: u64) -> u64 {
    let mut n = bound + 1;
    while !is_prime(n) {
        n += 1;
    }
    n
}

/// `(4(q-1)(q-2))^2`, the threshold the next paper prime must exceed.
pub fn paper_bound(q: u64) -> Option<u64> {
    let b = 4u64.checked_mul(q - 1)?.checked_mul(q - 2)?;
    b.checked_mul(b)
}

static PAPER: Mutex<Vec<u64>> = Mutex::new(Vec::new());
static TOY: Mutex<Vec<u64>> = Mutex::new(Vec::new());

/// Primes cheap enough to find without the explicit slow flag.
const FAST_PAPER_INDICES: usize = 2;

/// The prime `q_n` of the given policy.
pub fn prime_sequence(n: usize, policy: Policy, allow_slow: bool) -> Result<u64, CurveError> {
    match policy {
        Policy::Toy => {
            let mut cache = TOY.lock().expect("prime cache poisoned");
            while cache.len() <= n {
                let next = cache.last().map_or(5, |&q| least_prime_above(q));
                cache.push(next);
            }
            Ok(cache[n])
        }
        Policy::Paper => {
            let mut cache = PAPER.lock().expect("prime cache poisoned");
            if cache.is_empty() {
                cache.push(5);
            }
            while cache.len() <= n {
                let k = cache.len();
                if k >= FAST_PAPER_INDICES && !allow_slow {
                    return Err(CurveError::SlowSearchRequired(k));
                }
                let bound = paper_bound(cache[k - 1]).ok_or(CurveError::OutOfRange(k))?;
                cache.push(least_prime_above(bound));
            }
            Ok(cache[n])
        }
    }
}

/// Genus of a smooth plane curve of degree `d`.
pub fn genus(d: u64) -> u128 {
    let d = d as u128;
    if d < 2 {
        return 0;
    }
    (d - 1) * (d - 2) / 2
}

/// Number of nontrivial solutions the roots-of-unity orbit produces.
pub fn orbit_count(q: u64) -> u128 {
    6 * (q as u128) * (q as u128)
}

/// `X^q + Y^q - 1` with `X` as variable 0 and `Y` as variable 1.
pub fn fermat_poly(q: u32) -> Poly {
    let one = Rational::from_integer(BigInt::from(1));
    Poly::from_terms([
        (Monomial::var(0, q), one.clone()),
        (Monomial::var(1, q), one.clone()),
        (Monomial::one(), -one),
    ])
}

pub fn display_bivariate(p: &Poly) -> String {
    p.display_with(|v| if v == 0 { "X".into() } else { "Y".into() })
        .to_string()
}

/// The curve family under one prime policy.
#[derive(Debug, Clone, Copy, Default)]
pub struct CurveFamily {
    pub policy: Policy,
    pub allow_slow: bool,
}

impl CurveFamily {
    pub fn new(policy: Policy) -> Self {
        CurveFamily {
            policy,
            allow_slow: false,
        }
    }

    pub fn q(&self, i: usize) -> Result<u64, CurveError> {
        prime_sequence(i, self.policy, self.allow_slow)
    }

    /// Exponent as a tower-friendly `u32`.
    pub fn q32(&self, i: usize) -> Result<u32, CurveError> {
        let q = self.q(i)?;
        u32::try_from(q).map_err(|_| CurveError::OutOfRange(i))
    }

    pub fn curve_poly(&self, i: usize) -> Result<Poly, CurveError> {
        Ok(fermat_poly(self.q32(i)?))
    }

    /// The finite set of rational points; constant across the family.
    pub fn rational_solutions(&self, _i: usize) -> Vec<(Rational, Rational)> {
        rational_solutions()
    }

    pub fn evaluate(
        &self,
        i: usize,
        x: &FieldElement,
        y: &FieldElement,
    ) -> Result<FieldElement, CurveError> {
        evaluate_curve(self.q32(i)?, x, y)
    }
}

pub fn rational_solutions() -> Vec<(Rational, Rational)> {
    let zero = Rational::from_integer(BigInt::from(0));
    let one = Rational::from_integer(BigInt::from(1));
    vec![(zero.clone(), one.clone()), (one, zero)]
}

pub fn evaluate_curve(
    q: u32,
    x: &FieldElement,
    y: &FieldElement,
) -> Result<FieldElement, CurveError> {
    let s = x.pow(q).add(&y.pow(q))?;
    Ok(s.sub(&FieldElement::one(s.tower()))?)
}

/// The six points `(x, y)`, `(-x/y, 1/y)`, `(-y/x, 1/x)` and their swaps.
pub fn derived_solutions(
    x: &FieldElement,
    y: &FieldElement,
    q: u32,
) -> Result<Vec<(FieldElement, FieldElement)>, CurveError> {
    if x.is_zero() || y.is_zero() {
        return Err(CurveError::TrivialSolution);
    }
    if !evaluate_curve(q, x, y)?.is_zero() {
        return Err(CurveError::NotOnCurve);
    }
    let yi = y.inv()?;
    let xi = x.inv()?;
    let a = (x.neg().mul(&yi)?, yi);
    let b = (y.neg().mul(&xi)?, xi);
    Ok(vec![
        (x.clone(), y.clone()),
        a.clone(),
        b.clone(),
        (y.clone(), x.clone()),
        (a.1, a.0),
        (b.1, b.0),
    ])
}
