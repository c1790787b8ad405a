//! Sparse multivariate polynomials over Q.
//!
//! Variables are generator ids of a [`Tower`](super::Tower). Monomials are kept
//! sparse because a single element usually touches only a handful of the
//! (possibly many) transcendental generators.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Var = u32;

/// Power product `x_{v0}^{e0} * x_{v1}^{e1} * ...`, sorted by variable, no zero
/// exponents.
///
/// Ordered lexicographically with lower variable ids more significant.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var, e: u32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v, e)])
        }
    }

    pub fn from_pairs(mut pairs: Vec<(Var, u32)>) -> Self {
        pairs.retain(|&(_, e)| e > 0);
        pairs.sort_unstable_by_key(|&(v, _)| v);
        let mut out: Vec<(Var, u32)> = Vec::with_capacity(pairs.len());
        for (v, e) in pairs {
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 += e,
                _ => out.push((v, e)),
            }
        }
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, v: Var) -> u32 {
        match self.0.binary_search_by_key(&v, |&(w, _)| w) {
            Ok(i) => self.0[i].1,
            Err(_) => 0,
        }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (self.0[i], other.0[j]);
            match a.0.cmp(&b.0) {
                Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &(v, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < v {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == v {
                let f = other.0[j].1;
                j += 1;
                match e.cmp(&f) {
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                    Ordering::Greater => out.push((v, e - f)),
                }
            } else {
                out.push((v, e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Componentwise minimum.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::new();
        for &(v, e) in &self.0 {
            let f = other.exponent(v);
            if f > 0 {
                out.push((v, e.min(f)));
            }
        }
        Monomial(out)
    }

    /// Drops variable `v`, returning its exponent and the remaining monomial.
    pub fn split_var(&self, v: Var) -> (u32, Monomial) {
        let mut e = 0;
        let rest = self
            .0
            .iter()
            .filter(|&&(w, f)| {
                if w == v {
                    e = f;
                    false
                } else {
                    true
                }
            })
            .copied()
            .collect();
        (e, Monomial(rest))
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.0.iter().map(|&(v, _)| v)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(va, ea)), Some(&(vb, eb))) => match va.cmp(&vb) {
                    // self carries a more significant variable
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(&eb);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Multivariate polynomial with rational coefficients, zero terms never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn from_int(n: i64) -> Self {
        Poly::constant(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn var(v: Var) -> Self {
        Poly::monomial(Monomial::var(v, 1), BigRational::one())
    }

    pub fn monomial(m: Monomial, c: BigRational) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, BigRational)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .is_some_and(|(m, c)| m.is_one() && c.is_one())
    }

    /// The constant value, if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn as_monomial(&self) -> Option<(&Monomial, &BigRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> BigRational {
        self.leading()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self.terms.keys().flat_map(|m| m.vars()).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exponent(v) > 0)
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() = super::q::add(e.get(), &c);
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let (big, small) = if self.terms.len() >= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, d)| (m.clone(), super::q::mul(d, c)))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(n, d)| (n.mul(m), super::q::mul(d, c)))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            for (n, d) in &other.terms {
                out.add_term(m.mul(n), super::q::mul(c, d));
            }
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact quotient `self / divisor`, or `None` if the division leaves a
    /// remainder.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        if let Some(c) = divisor.as_constant() {
            return Some(self.scale(&super::q::recip(&c)));
        }
        let (lm, lc) = divisor.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((m, c)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let qm = m.div(&lm)?;
            let qc = super::q::div(&c, &lc);
            for (n, d) in &divisor.terms {
                rem.add_term(n.mul(&qm), -super::q::mul(d, &qc));
            }
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Substitutes `value` for variable `v`.
    pub fn eval_var(&self, v: Var, value: &BigRational) -> Poly {
        let mut out = Poly::zero();
        let mut powers: BTreeMap<u32, BigRational> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_var(v);
            if e == 0 {
                out.add_term(rest, c.clone());
                continue;
            }
            let p = powers
                .entry(e)
                .or_insert_with(|| super::q::pow(value, e))
                .clone();
            out.add_term(rest, super::q::mul(c, &p));
        }
        out
    }

    /// Formal partial derivative.
    pub fn derivative(&self, v: Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_var(v);
            if e > 0 {
                out.add_term(
                    rest.mul(&Monomial::var(v, e - 1)),
                    c * BigRational::from_integer(BigInt::from(e)),
                );
            }
        }
        out
    }

    /// Scaled so the leading coefficient is one. Zero stays zero.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&super::q::recip(c)),
        }
    }

    /// Splits into `(content, primitive)` where the primitive part has
    /// coprime integer coefficients and positive leading coefficient.
    pub fn integer_content(&self) -> (BigRational, Poly) {
        if self.is_zero() {
            return (BigRational::zero(), Poly::zero());
        }
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            den_lcm = super::q::lcm(&den_lcm, c.denom());
        }
        let mut num_gcd = BigInt::zero();
        for c in self.terms.values() {
            let n = if den_lcm.is_one() {
                c.numer().clone()
            } else {
                c.numer() * (&den_lcm / c.denom())
            };
            num_gcd = super::q::gcd(&num_gcd, &n);
            if num_gcd.is_one() && den_lcm.is_one() {
                break;
            }
        }
        let mut content = super::q::make(num_gcd, den_lcm);
        if self.leading_coeff().is_negative() {
            content = -content;
        }
        if content.is_one() {
            return (content, self.clone());
        }
        let prim = self.scale(&super::q::recip(&content));
        (content, prim)
    }

    /// Coefficients of the primitive integer associate (positive leading
    /// coefficient).
    pub fn integer_coefficients(&self) -> Vec<(Monomial, BigInt)> {
        let (_, prim) = self.integer_content();
        prim.terms
            .into_iter()
            .map(|(m, c)| (m, c.to_integer()))
            .collect()
    }

    /// Coefficients with respect to variable `v`: exponent ↦ coefficient
    /// polynomial free of `v`.
    pub fn coefficients_in(&self, v: Var) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_var(v);
            out.entry(e).or_default().add_term(rest, c.clone());
        }
        out
    }

    pub fn from_coefficients_in(v: Var, coeffs: &BTreeMap<u32, Poly>) -> Poly {
        let mut out = Poly::zero();
        for (&e, p) in coeffs {
            let vm = Monomial::var(v, e);
            for (m, c) in &p.terms {
                out.add_term(m.mul(&vm), c.clone());
            }
        }
        out
    }
}

pub(crate) fn fmt_rational(c: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

impl Poly {
    /// Renders with generator labels supplied by `name`.
    pub fn display_with<'a, F>(&'a self, name: F) -> PolyDisplay<'a, F>
    where
        F: Fn(Var) -> String,
    {
        PolyDisplay { poly: self, name }
    }
}

pub struct PolyDisplay<'a, F> {
    poly: &'a Poly,
    name: F,
}

impl<F: Fn(Var) -> String> fmt::Display for PolyDisplay<'_, F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.poly.terms.iter().rev().enumerate() {
            let abs = c.abs();
            if k == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut first = true;
            if !abs.is_one() || m.is_one() {
                fmt_rational(&abs, f)?;
                first = false;
            }
            for &(v, e) in m.pairs() {
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                write!(f, "{}", (self.name)(v))?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(|v| format!("v{v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn lex_order_prefers_lower_variables() {
        let x0 = Monomial::var(0, 1);
        let x1_5 = Monomial::var(1, 5);
        assert!(x0 > x1_5);
        assert!(Monomial::var(0, 2) > x0);
        assert!(x0.mul(&Monomial::var(1, 1)) > x0);
        assert!(Monomial::one() < x1_5);
    }

    #[test]
    fn exact_division_detects_remainders() {
        let x = Poly::var(0);
        let y = Poly::var(1);
        let a = x.add(&y).mul(&x.sub(&y));
        assert_eq!(a.div_exact(&x.add(&y)).unwrap(), x.sub(&y));
        assert!(a.div_exact(&x.add(&Poly::one())).is_none());
    }

    #[test]
    fn eval_and_derivative() {
        let x = Poly::var(0);
        let p = Poly::one().sub(&x.pow(5));
        assert_eq!(p.eval_var(0, &q(2)).as_constant(), Some(q(-31)));
        assert_eq!(p.derivative(0), x.pow(4).scale(&q(-5)));
    }

    #[test]
    fn integer_content_normalizes_sign() {
        let x = Poly::var(0);
        let p = x
            .scale(&BigRational::new(BigInt::from(-2), BigInt::from(3)))
            .add(&Poly::constant(BigRational::new(
                BigInt::from(4),
                BigInt::from(9),
            )));
        let (c, prim) = p.integer_content();
        assert_eq!(c, BigRational::new(BigInt::from(-2), BigInt::from(9)));
        assert_eq!(prim, x.scale(&q(3)).sub(&Poly::from_int(2)));
    }

    #[test]
    fn display_uses_descending_lex() {
        let x = Poly::var(0);
        let p = Poly::one().sub(&x.pow(5));
        assert_eq!(p.to_string(), "-v0^5 + 1");
    }
}
