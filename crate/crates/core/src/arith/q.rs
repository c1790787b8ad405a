//! Rational helpers for the polynomial hot paths. `num-bigint`'s gcd is
//! binary and quadratic per call on large operands, and `Ratio` calls it on
//! every operation, so integer-only cases short-circuit and the rest use
//! Euclid by remainder.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Nonnegative gcd by remainder sequence.
pub fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut a, mut b) = (a.abs(), b.abs());
    if a < b {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_zero() {
        if b.is_one() {
            return b;
        }
        let r = &a % &b;
        a = std::mem::replace(&mut b, r);
    }
    a
}

pub fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    if a.is_one() {
        return b.abs();
    }
    if b.is_one() {
        return a.abs();
    }
    if a.is_zero() || b.is_zero() {
        return BigInt::zero();
    }
    (a / gcd(a, b) * b).abs()
}

/// `n / d` in lowest terms with positive denominator.
pub fn make(n: BigInt, d: BigInt) -> BigRational {
    assert!(!d.is_zero(), "zero denominator");
    if d.is_one() {
        return BigRational::from_integer(n);
    }
    let g = gcd(&n, &d);
    let (mut n, mut d) = if g.is_one() { (n, d) } else { (n / &g, d / &g) };
    if d.is_negative() {
        n = -n;
        d = -d;
    }
    BigRational::new_raw(n, d)
}

pub fn mul(a: &BigRational, b: &BigRational) -> BigRational {
    match (a.denom().is_one(), b.denom().is_one()) {
        (true, true) => BigRational::from_integer(a.numer() * b.numer()),
        _ => make(a.numer() * b.numer(), a.denom() * b.denom()),
    }
}

pub fn add(a: &BigRational, b: &BigRational) -> BigRational {
    if a.denom().is_one() && b.denom().is_one() {
        return BigRational::from_integer(a.numer() + b.numer());
    }
    if a.denom() == b.denom() {
        return make(a.numer() + b.numer(), a.denom().clone());
    }
    make(
        a.numer() * b.denom() + b.numer() * a.denom(),
        a.denom() * b.denom(),
    )
}

pub fn recip(a: &BigRational) -> BigRational {
    assert!(!a.is_zero(), "division by zero");
    if a.numer().is_negative() {
        BigRational::new_raw(-a.denom(), -a.numer())
    } else {
        BigRational::new_raw(a.denom().clone(), a.numer().clone())
    }
}

/// Powers of a reduced fraction stay reduced.
pub fn pow(a: &BigRational, e: u32) -> BigRational {
    BigRational::new_raw(
        num_traits::pow(a.numer().clone(), e as usize),
        num_traits::pow(a.denom().clone(), e as usize),
    )
}

pub fn div(a: &BigRational, b: &BigRational) -> BigRational {
    mul(a, &recip(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn agrees_with_ratio() {
        let xs = [r(3, 4), r(-5, 6), r(7, 1), r(0, 1), r(-2, 9), r(12, 1)];
        for a in &xs {
            for b in &xs {
                assert_eq!(add(a, b), a + b);
                assert_eq!(mul(a, b), a * b);
                assert_eq!(pow(a, 3), num_traits::pow(a.clone(), 3));
                if !b.is_zero() {
                    assert_eq!(div(a, b), a / b);
                }
            }
        }
        assert_eq!(gcd(&BigInt::from(-12), &BigInt::from(18)), BigInt::from(6));
        assert_eq!(lcm(&BigInt::from(4), &BigInt::from(6)), BigInt::from(12));
    }
}
