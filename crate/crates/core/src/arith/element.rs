use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;

use super::poly::{Monomial, Poly, Var};
use super::ratfn::RatFn;
use super::tower::{GeneratorKind, Tower};
use super::{ArithError, Rational};

/// Normal form: radical monomial (exponents below each generator's `q`) ↦
/// nonzero base-field coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Rep(BTreeMap<Monomial, RatFn>);

impl Rep {
    pub fn zero() -> Self {
        Rep::default()
    }

    pub fn one() -> Self {
        Rep::base(RatFn::one())
    }

    pub fn base(c: RatFn) -> Self {
        Rep::term(Monomial::one(), c)
    }

    pub fn term(m: Monomial, c: RatFn) -> Self {
        let mut r = Rep::zero();
        if !c.is_zero() {
            r.0.insert(m, c);
        }
        r
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &RatFn)> {
        self.0.iter()
    }

    /// The base-field value when no radical monomial occurs.
    pub fn as_base(&self) -> Option<RatFn> {
        match self.0.len() {
            0 => Some(RatFn::zero()),
            1 => {
                let (m, c) = self.0.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<Rational> {
        self.as_base().and_then(|c| c.as_constant())
    }

    pub(crate) fn contains_base_var(&self, v: Var) -> bool {
        self.0.values().any(|c| c.contains_var(v))
    }

    pub(crate) fn radical_vars(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self.0.keys().flat_map(|m| m.vars()).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    pub(crate) fn base_vars(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self.0.values().flat_map(|c| c.vars()).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    fn add_term(&mut self, m: Monomial, c: RatFn) {
        if c.is_zero() {
            return;
        }
        match self.0.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub(crate) fn add(&self, other: &Rep) -> Rep {
        let mut out = self.clone();
        for (m, c) in &other.0 {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub(crate) fn neg(&self) -> Rep {
        Rep(self.0.iter().map(|(m, c)| (m.clone(), c.neg())).collect())
    }

    pub(crate) fn sub(&self, other: &Rep) -> Rep {
        self.add(&other.neg())
    }

    pub(crate) fn scale_base(&self, c: &RatFn) -> Rep {
        if c.is_zero() {
            return Rep::zero();
        }
        Rep(self.0.iter().map(|(m, d)| (m.clone(), d.mul(c))).collect())
    }

    pub(crate) fn mul(&self, other: &Rep, tower: &Tower) -> Rep {
        if self.is_zero() || other.is_zero() {
            return Rep::zero();
        }
        if let Some(c) = self.as_base() {
            return other.scale_base(&c);
        }
        if let Some(c) = other.as_base() {
            return self.scale_base(&c);
        }
        let mut out = Rep::zero();
        for (ma, ca) in &self.0 {
            for (mb, cb) in &other.0 {
                let c = ca.mul(cb);
                let m = ma.mul(mb);
                let overflow = m.pairs().iter().any(|&(g, e)| e >= tower.radical_q(g));
                if overflow {
                    out = out.add(&reduce_term(m, c, tower));
                } else {
                    out.add_term(m, c);
                }
            }
        }
        out
    }

    pub(crate) fn pow(&self, mut e: u32, tower: &Tower) -> Rep {
        let mut base = self.clone();
        let mut acc = Rep::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, tower);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, tower);
            }
        }
        acc
    }

    /// Inverse by extended Euclid against `Y^q - c` for the highest radical
    /// present, recursing into the subtower for leading coefficients.
    pub(crate) fn inv(&self, tower: &Tower) -> Result<Rep, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        // Split off the common radical monomial: y^-e = y^(q-e) / c.
        let mut common: Option<Monomial> = None;
        for m in self.0.keys() {
            common = Some(match common {
                None => m.clone(),
                Some(g) => g.gcd(m),
            });
        }
        let common = common.expect("nonzero");
        if !common.is_one() {
            let rest = Rep(self
                .0
                .iter()
                .map(|(m, c)| (m.div(&common).expect("common factor"), c.clone()))
                .collect());
            let mut out = rest.inv(tower)?;
            for &(g, e) in common.pairs() {
                let (q, radicand) = tower.radical(g);
                let up = Rep::term(Monomial::var(g, q - e), RatFn::one());
                out = out.mul(&up, tower).mul(&radicand.inv(tower)?, tower);
            }
            return Ok(out);
        }
        let Some(&top) = self.radical_vars().last() else {
            let c = self.as_base().expect("no radicals means base field");
            return Ok(Rep::base(c.inv().ok_or(ArithError::DivisionByZero)?));
        };
        let (q, radicand) = tower.radical(top);
        let mut a: Vec<Rep> = vec![Rep::zero(); q as usize];
        for (m, c) in &self.0 {
            let (e, rest) = m.split_var(top);
            a[e as usize].add_term(rest, c.clone());
        }
        if let Some(out) = inv_over_base(&a, q, radicand, top) {
            return Ok(out);
        }
        let mut modulus = vec![Rep::zero(); q as usize + 1];
        modulus[0] = radicand.neg();
        modulus[q as usize] = Rep::one();
        let mut r0 = trim(modulus);
        let mut r1 = trim(a);
        let mut s0: Vec<Rep> = Vec::new();
        let mut s1: Vec<Rep> = vec![Rep::one()];
        while r1.len() > 1 {
            let (quot, rem) = upoly_divrem(&r0, &r1, tower)?;
            let next_s = upoly_sub(&s0, &upoly_mul(&quot, &s1, tower));
            r0 = std::mem::replace(&mut r1, rem);
            s0 = std::mem::replace(&mut s1, next_s);
        }
        if r1.is_empty() {
            // Only possible if Y^q - c were reducible.
            return Err(ArithError::ReducibleRelation(tower.label(top).to_string()));
        }
        let g_inv = r1[0].inv(tower)?;
        let mut out = Rep::zero();
        for (k, coeff) in s1.iter().enumerate() {
            let coeff = coeff.mul(&g_inv, tower);
            let shift = Monomial::var(top, k as u32);
            for (m, c) in &coeff.0 {
                out.add_term(m.mul(&shift), c.clone());
            }
        }
        Ok(out)
    }

    /// Substitutes `value` for base variable `v` in every coefficient.
    pub(crate) fn eval_var(&self, v: Var, value: &Rational) -> Option<Rep> {
        let mut out = Rep::zero();
        for (m, c) in &self.0 {
            let c = if c.contains_var(v) {
                c.eval_var(v, value)?
            } else {
                c.clone()
            };
            out.add_term(m.clone(), c);
        }
        Some(out)
    }

    pub(crate) fn display_with<'a>(&'a self, tower: &'a Tower) -> RepDisplay<'a> {
        RepDisplay { rep: self, tower }
    }
}

/// Inverse of `sum a[k] Y^k` modulo `Y^q - c` when every `a[k]` and `c` lie
/// in the base field: solves the multiplication system by fraction-free
/// Gauss-Jordan elimination over the polynomial ring. `None` when the
/// coefficients involve lower radicals.
fn inv_over_base(a: &[Rep], q: u32, radicand: &Rep, top: Var) -> Option<Rep> {
    let n = q as usize;
    let c = radicand.as_base()?;
    let coeffs: Vec<RatFn> = a.iter().map(Rep::as_base).collect::<Option<_>>()?;
    let mut l = Poly::one();
    for k in &coeffs {
        if !k.den().is_one() {
            l = super::gcd::lcm(&l, k.den());
        }
    }
    let ints: Vec<Poly> = coeffs
        .iter()
        .map(|k| {
            if k.den().is_one() {
                k.num().mul(&l)
            } else {
                k.num()
                    .mul(&l.div_exact(k.den()).expect("lcm is a multiple"))
            }
        })
        .collect();
    // Column j holds a * Y^j, scaled by den(c) so wrapped terms stay integral.
    let mut m: Vec<Vec<Poly>> = (0..n)
        .map(|i| {
            let mut row: Vec<Poly> = (0..n)
                .map(|j| {
                    if i >= j {
                        ints[i - j].mul(c.den())
                    } else {
                        ints[i + n - j].mul(c.num())
                    }
                })
                .collect();
            row.push(if i == 0 { Poly::one() } else { Poly::zero() });
            row
        })
        .collect();
    let mut prev = Poly::one();
    for k in 0..n {
        let r = (k..n).find(|&r| !m[r][k].is_zero())?;
        m.swap(k, r);
        let pivot = m[k][k].clone();
        for i in 0..n {
            if i == k {
                continue;
            }
            let f = std::mem::replace(&mut m[i][k], Poly::zero());
            for j in k + 1..=n {
                let v = pivot.mul(&m[i][j]).sub(&f.mul(&m[k][j]));
                m[i][j] = v.div_exact(&prev).expect("fraction-free step is exact");
            }
            if i < k {
                m[i][i] = pivot.clone();
            }
        }
        prev = pivot;
    }
    let scale = c.den().mul(&l);
    let mut out = Rep::zero();
    for (i, row) in m.iter().enumerate() {
        if row[n].is_zero() {
            continue;
        }
        let coeff = RatFn::new(row[n].mul(&scale), prev.clone());
        out.add_term(Monomial::var(top, i as u32), coeff);
    }
    Some(out)
}

fn reduce_term(m: Monomial, c: RatFn, tower: &Tower) -> Rep {
    let mut kept = Vec::with_capacity(m.pairs().len());
    let mut overflow = Vec::new();
    for &(g, e) in m.pairs() {
        let q = tower.radical_q(g);
        if e >= q {
            overflow.push((g, e / q));
        }
        kept.push((g, e % q));
    }
    let mut out = Rep::term(Monomial::from_pairs(kept), c);
    for (g, k) in overflow {
        let (_, radicand) = tower.radical(g);
        for _ in 0..k {
            out = out.mul(radicand, tower);
        }
    }
    out
}

fn trim(mut p: Vec<Rep>) -> Vec<Rep> {
    while p.last().is_some_and(Rep::is_zero) {
        p.pop();
    }
    p
}

fn upoly_sub(a: &[Rep], b: &[Rep]) -> Vec<Rep> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => x.sub(y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.neg(),
            (None, None) => Rep::zero(),
        })
        .collect();
    trim(out)
}

fn upoly_mul(a: &[Rep], b: &[Rep], tower: &Tower) -> Vec<Rep> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rep::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            out[i + j] = out[i + j].add(&x.mul(y, tower));
        }
    }
    trim(out)
}

fn upoly_divrem(a: &[Rep], b: &[Rep], tower: &Tower) -> Result<(Vec<Rep>, Vec<Rep>), ArithError> {
    let db = b.len() - 1;
    let lead_inv = b[db].inv(tower)?;
    let mut rem = a.to_vec();
    let mut quot = vec![Rep::zero(); a.len().saturating_sub(db).max(1)];
    while rem.len() > db {
        let dr = rem.len() - 1;
        let factor = rem[dr].mul(&lead_inv, tower);
        let shift = dr - db;
        for (i, bi) in b.iter().enumerate() {
            rem[i + shift] = rem[i + shift].sub(&bi.mul(&factor, tower));
        }
        quot[shift] = factor;
        rem = trim(rem);
    }
    Ok((trim(quot), rem))
}

pub(crate) struct RepDisplay<'a> {
    rep: &'a Rep,
    tower: &'a Tower,
}

impl fmt::Display for RepDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rep.is_zero() {
            return write!(f, "0");
        }
        let name = |v: Var| self.tower.label(v).to_string();
        for (k, (m, c)) in self.rep.0.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if m.is_one() {
                if self.rep.0.len() > 1 {
                    write!(f, "({})", c.display_with(name))?;
                } else {
                    write!(f, "{}", c.display_with(name))?;
                }
                continue;
            }
            if !c.is_one() {
                write!(f, "({})*", c.display_with(name))?;
            }
            let mut first = true;
            for &(g, e) in m.pairs() {
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                write!(f, "{}", self.tower.label(g))?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// An element of a [`Tower`] in canonical normal form.
///
/// Equality is decided on normal forms; two elements of different lineages
/// are never equal.
#[derive(Clone, Debug)]
pub struct FieldElement {
    tower: Arc<Tower>,
    rep: Rep,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.tower.lineage() == other.tower.lineage() && self.rep == other.rep
    }
}

impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rep.hash(state);
    }
}

impl FieldElement {
    pub fn from_rep(tower: Arc<Tower>, rep: Rep) -> Self {
        FieldElement { tower, rep }
    }

    pub fn zero(tower: &Arc<Tower>) -> Self {
        FieldElement::from_rep(tower.clone(), Rep::zero())
    }

    pub fn one(tower: &Arc<Tower>) -> Self {
        FieldElement::from_rep(tower.clone(), Rep::one())
    }

    pub fn rational(tower: &Arc<Tower>, c: Rational) -> Self {
        FieldElement::from_rep(tower.clone(), Rep::base(RatFn::constant(c)))
    }

    pub fn integer(tower: &Arc<Tower>, n: i64) -> Self {
        FieldElement::rational(tower, Rational::from_integer(BigInt::from(n)))
    }

    pub fn base(tower: &Arc<Tower>, c: RatFn) -> Self {
        FieldElement::from_rep(tower.clone(), Rep::base(c))
    }

    /// The element denoted by a generator label.
    pub fn generator(tower: &Arc<Tower>, label: &str) -> Result<Self, ArithError> {
        let id = tower
            .find(label)
            .ok_or_else(|| ArithError::UnknownLabel(label.to_string()))?;
        let rep = match &tower.generator(id).kind {
            GeneratorKind::Transcendental => Rep::base(RatFn::from_poly(Poly::var(id))),
            GeneratorKind::Radical { .. } => Rep::term(Monomial::var(id, 1), RatFn::one()),
            GeneratorKind::Specialized(v) => Rep::base(RatFn::constant(v.clone())),
        };
        Ok(FieldElement::from_rep(tower.clone(), rep))
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn rep(&self) -> &Rep {
        &self.rep
    }

    pub fn is_zero(&self) -> bool {
        self.rep.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.rep == Rep::one()
    }

    pub fn as_rational(&self) -> Option<Rational> {
        self.rep.as_rational()
    }

    /// The larger of two compatible towers.
    fn joint(&self, other: &FieldElement) -> Result<Arc<Tower>, ArithError> {
        if self.tower.lineage() != other.tower.lineage() {
            return Err(ArithError::TowerMismatch);
        }
        Ok(if self.tower.len() >= other.tower.len() {
            self.tower.clone()
        } else {
            other.tower.clone()
        })
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement, ArithError> {
        let t = self.joint(other)?;
        Ok(FieldElement::from_rep(t, self.rep.add(&other.rep)))
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement, ArithError> {
        let t = self.joint(other)?;
        Ok(FieldElement::from_rep(t, self.rep.sub(&other.rep)))
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement, ArithError> {
        let t = self.joint(other)?;
        let rep = self.rep.mul(&other.rep, &t);
        Ok(FieldElement::from_rep(t, rep))
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement, ArithError> {
        self.mul(&other.inv()?)
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement::from_rep(self.tower.clone(), self.rep.neg())
    }

    pub fn inv(&self) -> Result<FieldElement, ArithError> {
        let rep = self.rep.inv(&self.tower)?;
        Ok(FieldElement::from_rep(self.tower.clone(), rep))
    }

    pub fn pow(&self, e: u32) -> FieldElement {
        FieldElement::from_rep(self.tower.clone(), self.rep.pow(e, &self.tower))
    }

    /// Re-homes the element into an extension of its tower.
    pub fn embed(&self, target: &Arc<Tower>) -> Result<FieldElement, ArithError> {
        if !self.tower.is_prefix_of(target) {
            return Err(ArithError::TowerMismatch);
        }
        Ok(FieldElement::from_rep(target.clone(), self.rep.clone()))
    }

    /// Image under the substitution `label ↦ value`, expressed over `target`,
    /// which must be the matching specialization of this element's tower
    /// (possibly extended).
    pub fn substitute(
        &self,
        label: &str,
        value: &Rational,
        target: &Arc<Tower>,
    ) -> Result<FieldElement, ArithError> {
        let id = self
            .tower
            .find(label)
            .ok_or_else(|| ArithError::UnknownLabel(label.to_string()))?;
        if target.len() < self.tower.len() || target.specialized_value(id) != Some(value) {
            return Err(ArithError::TowerMismatch);
        }
        let rep = self
            .rep
            .eval_var(id, value)
            .ok_or_else(|| ArithError::SubstitutionSingularity(label.to_string()))?;
        Ok(FieldElement::from_rep(target.clone(), rep))
    }

    /// True iff the element is algebraic over Q: its normal form mentions no
    /// transcendental generator and no radical whose radicand chain does.
    pub fn is_algebraic_over_q(&self) -> bool {
        self.tower.rep_is_algebraic(&self.rep)
    }

    pub fn base_vars(&self) -> Vec<Var> {
        self.rep.base_vars()
    }

    pub fn radical_vars(&self) -> Vec<Var> {
        self.rep.radical_vars()
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rep.display_with(&self.tower))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Tower with x0 and y0^5 = 1 - x0^5.
    fn fermat_tower() -> Arc<Tower> {
        let t = Tower::new().adjoin_transcendental("x0").unwrap();
        let x0 = Poly::var(0);
        let radicand = Rep::base(RatFn::from_poly(Poly::one().sub(&x0.pow(5))));
        Arc::new(
            t.adjoin(super::super::Generator::radical("y0", 5, radicand))
                .unwrap(),
        )
    }

    #[test]
    fn relation_rewrites() {
        let t = fermat_tower();
        let x0 = FieldElement::generator(&t, "x0").unwrap();
        let y0 = FieldElement::generator(&t, "y0").unwrap();
        let one = FieldElement::one(&t);
        assert_eq!(y0.pow(5), one.sub(&x0.pow(5)).unwrap());
        // y0^6 = y0 - x0^5 y0
        let expect = y0.sub(&x0.pow(5).mul(&y0).unwrap()).unwrap();
        assert_eq!(y0.pow(6), expect);
        assert!(x0.div(&x0).unwrap().is_one());
    }

    #[test]
    fn inverse_of_radical() {
        let t = fermat_tower();
        let x0 = FieldElement::generator(&t, "x0").unwrap();
        let y0 = FieldElement::generator(&t, "y0").unwrap();
        let one = FieldElement::one(&t);
        let inv = y0.inv().unwrap();
        let expect = y0.pow(4).div(&one.sub(&x0.pow(5)).unwrap()).unwrap();
        assert_eq!(inv, expect);
        assert!(inv.mul(&y0).unwrap().is_one());
        let z = x0.add(&y0).unwrap().add(&one).unwrap();
        assert!(z.inv().unwrap().mul(&z).unwrap().is_one());
        assert_eq!(
            FieldElement::zero(&t).inv(),
            Err(ArithError::DivisionByZero)
        );
    }

    #[test]
    fn mismatched_towers() {
        let a = fermat_tower();
        let b = fermat_tower();
        let x = FieldElement::generator(&a, "x0").unwrap();
        let y = FieldElement::generator(&b, "x0").unwrap();
        assert_eq!(x.add(&y), Err(ArithError::TowerMismatch));
    }

    #[test]
    fn display_round() {
        let t = fermat_tower();
        let y0 = FieldElement::generator(&t, "y0").unwrap();
        assert_eq!(y0.pow(6).to_string(), "(-x0^5 + 1)*y0");
        assert_eq!(y0.pow(5).to_string(), "-x0^5 + 1");
    }
}
