//! Reduced fractions of polynomials: the base field Q(x0, x1, ...).

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::gcd::gcd;
use super::poly::{Poly, Var};

/// `num / den` with `gcd(num, den) = 1` and `den` monic. Zero is `0 / 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFn {
    num: Poly,
    den: Poly,
}

impl RatFn {
    pub fn zero() -> Self {
        RatFn {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        RatFn::from_poly(Poly::one())
    }

    pub fn from_poly(num: Poly) -> Self {
        RatFn {
            num,
            den: Poly::one(),
        }
    }

    pub fn constant(c: BigRational) -> Self {
        RatFn::from_poly(Poly::constant(c))
    }

    /// Builds `num / den` in lowest terms. Panics when `den` is zero; callers
    /// check first.
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFn::zero();
        }
        if den.is_one() {
            return RatFn::from_poly(num);
        }
        if let Some(c) = den.as_constant() {
            return RatFn::from_poly(num.scale(&c.recip()));
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        let lc = den.leading_coeff();
        if lc.is_one() {
            RatFn { num, den }
        } else {
            let inv = lc.recip();
            RatFn {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.num.contains_var(v) || self.den.contains_var(v)
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut vs = self.num.vars();
        vs.extend(self.den.vars());
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    pub fn add(&self, other: &RatFn) -> RatFn {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            let num = self.num.add(&other.num);
            if self.den.is_one() {
                return RatFn::from_poly(num);
            }
            return RatFn::new(num, self.den.clone());
        }
        let g = gcd(&self.den, &other.den);
        let a = other.den.div_exact(&g).expect("gcd divides");
        let b = self.den.div_exact(&g).expect("gcd divides");
        let num = self.num.mul(&a).add(&other.num.mul(&b));
        RatFn::new(num, self.den.mul(&a))
    }

    pub fn neg(&self) -> RatFn {
        RatFn {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &RatFn) -> RatFn {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFn) -> RatFn {
        if self.is_zero() || other.is_zero() {
            return RatFn::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return RatFn::from_poly(self.num.mul(&other.num));
        }
        let g1 = gcd(&self.num, &other.den);
        let g2 = gcd(&other.num, &self.den);
        let n1 = self.num.div_exact(&g1).expect("gcd divides");
        let d2 = other.den.div_exact(&g1).expect("gcd divides");
        let n2 = other.num.div_exact(&g2).expect("gcd divides");
        let d1 = self.den.div_exact(&g2).expect("gcd divides");
        RatFn::new(n1.mul(&n2), d1.mul(&d2))
    }

    pub fn scale(&self, c: &BigRational) -> RatFn {
        if c.is_zero() {
            return RatFn::zero();
        }
        RatFn {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<RatFn> {
        if self.is_zero() {
            return None;
        }
        Some(RatFn::new(self.den.clone(), self.num.clone()))
    }

    /// Substitutes a rational for `v`. `None` when the denominator vanishes.
    pub fn eval_var(&self, v: Var, value: &BigRational) -> Option<RatFn> {
        let den = self.den.eval_var(v, value);
        if den.is_zero() {
            return None;
        }
        Some(RatFn::new(self.num.eval_var(v, value), den))
    }

    pub fn display_with<'a, F>(&'a self, name: F) -> RatFnDisplay<'a, F>
    where
        F: Fn(Var) -> String + Copy,
    {
        RatFnDisplay { r: self, name }
    }
}

pub struct RatFnDisplay<'a, F> {
    r: &'a RatFn,
    name: F,
}

impl<F: Fn(Var) -> String + Copy> fmt::Display for RatFnDisplay<'_, F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.r.den.is_one() {
            write!(f, "{}", self.r.num.display_with(self.name))
        } else {
            write!(
                f,
                "({})/({})",
                self.r.num.display_with(self.name),
                self.r.den.display_with(self.name)
            )
        }
    }
}
