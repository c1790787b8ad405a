use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::ReductionError;
use crate::arith::gcd::lcm;
use crate::arith::{FieldElement, Monomial, Poly, Rational, Rep};
use crate::presentation::Presentation;

/// Default cap on the number of monomials one search may enumerate.
pub const DEFAULT_MONOMIAL_LIMIT: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    /// Maximal total degree.
    pub degree: u32,
    /// Maximal coefficient height, in bits, of a primitive integer witness.
    pub height: u64,
    pub monomials: usize,
}

impl Bounds {
    pub fn new(degree: u32, height: u64) -> Self {
        Bounds {
            degree,
            height,
            monomials: DEFAULT_MONOMIAL_LIMIT,
        }
    }
}

/// A primitive integer polynomial in the tuple positions, terms in
/// decreasing degree-lex order, leading coefficient positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    arity: usize,
    terms: Vec<(Vec<u32>, BigInt)>,
}

impl Witness {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> &[(Vec<u32>, BigInt)] {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.terms.first().map_or(0, |(e, _)| e.iter().sum())
    }

    /// Bit length of the largest coefficient.
    pub fn height(&self) -> u64 {
        self.terms.iter().map(|(_, c)| c.bits()).max().unwrap_or(0)
    }

    /// The witness as a polynomial with variable `k` for position `k`.
    pub fn to_poly(&self) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(e, c)| {
            let pairs = e.iter().enumerate().map(|(v, &k)| (v as u32, k)).collect();
            (
                Monomial::from_pairs(pairs),
                Rational::from_integer(c.clone()),
            )
        }))
    }

    pub fn evaluate(&self, tuple: &[FieldElement]) -> Result<FieldElement, ReductionError> {
        let first = tuple.first().ok_or(ReductionError::EmptyTuple)?;
        let mut acc = FieldElement::zero(first.tower());
        for (e, c) in &self.terms {
            let mut t = FieldElement::rational(first.tower(), Rational::from_integer(c.clone()));
            for (x, &k) in tuple.iter().zip(e) {
                if k > 0 {
                    t = t.mul(&x.pow(k))?;
                }
            }
            acc = acc.add(&t)?;
        }
        Ok(acc)
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> WitnessDisplay<'a> {
        WitnessDisplay { w: self, names }
    }

    /// `X`, `X Y`, or `X1 .. Xn` for longer tuples.
    pub fn default_names(arity: usize) -> Vec<String> {
        match arity {
            1 => vec!["X".into()],
            2 => vec!["X".into(), "Y".into()],
            n => (1..=n).map(|k| format!("X{k}")).collect(),
        }
    }
}

pub struct WitnessDisplay<'a> {
    w: &'a Witness,
    names: &'a [String],
}

impl fmt::Display for WitnessDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.w.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (e, c)) in self.w.terms.iter().enumerate() {
            let (neg, mag) = (c.is_negative(), c.abs());
            match (n, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(v, &k)| {
                    let name = &self.names[v];
                    if k == 1 {
                        name.clone()
                    } else {
                        format!("{name}^{k}")
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                f.write_str(&vars.join("*"))?;
            } else {
                write!(f, "{mag}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = Witness::default_names(self.arity);
        self.display_with(&names).fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cutoff {
    /// Annihilators exist within the degree bound, but the ones met were
    /// taller than the height bound.
    Height,
    /// The monomial budget ran out before the degree bound was reached.
    Monomials,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Search {
    Found(Witness),
    /// No nonzero polynomial of degree within the bound vanishes.
    Absent,
    Inconclusive(Cutoff),
}

impl Search {
    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Search::Found(w) => Some(w),
            _ => None,
        }
    }

    pub fn is_conclusive(&self) -> bool {
        !matches!(self, Search::Inconclusive(_))
    }
}

pub fn annihilator_search(
    p: &Presentation,
    tuple: &[usize],
    bounds: Bounds,
) -> Result<Search, ReductionError> {
    let mut elems = Vec::with_capacity(tuple.len());
    for &idx in tuple {
        if idx >= p.domain_size() {
            return Err(ReductionError::IndexOutOfRange(idx));
        }
        elems.push(p.interp(idx)?.clone());
    }
    search_elements(&elems, bounds)
}

/// Adds monomials in the tuple in increasing degree-lex order and stops at
/// the first one that is a Q-linear combination of its predecessors. That
/// dependency is the annihilator with the least leading monomial.
pub fn search_elements(tuple: &[FieldElement], bounds: Bounds) -> Result<Search, ReductionError> {
    let first = tuple.first().ok_or(ReductionError::EmptyTuple)?;
    let n = tuple.len();
    let mut exps: Vec<Vec<u32>> = Vec::new();
    let mut vals: Vec<FieldElement> = Vec::new();
    let mut slot: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut elim = Eliminator::default();
    let mut too_tall = false;
    for d in 0..=bounds.degree {
        let level = match level_size(n, d) {
            Some(c) if exps.len() + c <= bounds.monomials => exponents_of_degree(n, d),
            _ => return Ok(Search::Inconclusive(Cutoff::Monomials)),
        };
        for e in level {
            let v = match e.iter().position(|&k| k > 0) {
                None => FieldElement::one(first.tower()),
                Some(i) => {
                    let mut parent = e.clone();
                    parent[i] -= 1;
                    vals[slot[&parent]].mul(&tuple[i])?
                }
            };
            let k = vals.len();
            slot.insert(e.clone(), k);
            exps.push(e);
            vals.push(v);
            let Some(combo) = elim.push(k, &vals) else {
                continue;
            };
            let w = witness_from(n, &exps, combo);
            if w.height() > bounds.height {
                too_tall = true;
                continue;
            }
            let mut acc = FieldElement::zero(first.tower());
            for (e, c) in &w.terms {
                let t = vals[slot[e]].mul(&FieldElement::rational(
                    first.tower(),
                    Rational::from_integer(c.clone()),
                ))?;
                acc = acc.add(&t)?;
            }
            if !acc.is_zero() {
                return Err(ReductionError::WitnessFailed);
            }
            return Ok(Search::Found(w));
        }
    }
    Ok(if too_tall {
        Search::Inconclusive(Cutoff::Height)
    } else {
        Search::Absent
    })
}

/// Number of monomials of degree `d` in `n` variables, if it fits a usize.
fn level_size(n: usize, d: u32) -> Option<usize> {
    // C(n - 1 + d, n - 1)
    let mut c: u128 = 1;
    let k = n as u128 - 1;
    for j in 1..=k {
        c = c.checked_mul(d as u128 + j)? / j;
    }
    usize::try_from(c).ok()
}

/// Exponent vectors of total degree `d`, increasing lex with position 0 most
/// significant.
fn exponents_of_degree(n: usize, d: u32) -> Vec<Vec<u32>> {
    if n == 1 {
        return vec![vec![d]];
    }
    let mut out = Vec::new();
    for e0 in 0..=d {
        for rest in exponents_of_degree(n - 1, d - e0) {
            let mut e = Vec::with_capacity(n);
            e.push(e0);
            e.extend(rest);
            out.push(e);
        }
    }
    out
}

fn witness_from(n: usize, exps: &[Vec<u32>], combo: BTreeMap<usize, Rational>) -> Witness {
    let den = combo
        .values()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut ints: Vec<(usize, BigInt)> = combo
        .into_iter()
        .map(|(k, c)| (k, (c * Rational::from_integer(den.clone())).to_integer()))
        .filter(|(_, c)| !c.is_zero())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, (_, c)| acc.gcd(c));
    // Largest index is the leading monomial.
    ints.sort_by(|a, b| b.0.cmp(&a.0));
    let sign = if ints[0].1.is_negative() {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    Witness {
        arity: n,
        terms: ints
            .into_iter()
            .map(|(k, c)| (exps[k].clone(), c / &g * &sign))
            .collect(),
    }
}

type Key = (Monomial, Monomial);

struct Row {
    vec: BTreeMap<Key, Rational>,
    combo: BTreeMap<usize, Rational>,
}

/// Incremental row echelon form over Q. Field elements become vectors by
/// clearing, per radical monomial, the lcm of all coefficient denominators
/// seen so far; when that lcm grows the rows are rebuilt.
#[derive(Default)]
struct Eliminator {
    dens: BTreeMap<Monomial, Poly>,
    rows: Vec<Row>,
    pivot: HashMap<Key, usize>,
}

impl Eliminator {
    /// Pushes `vals[k]`; returns the dependency it closes, if any.
    fn push(&mut self, k: usize, vals: &[FieldElement]) -> Option<BTreeMap<usize, Rational>> {
        if self.widen(vals[k].rep()) {
            self.rows.clear();
            self.pivot.clear();
            for (j, v) in vals[..k].iter().enumerate() {
                self.reduce(j, v.rep());
            }
        }
        self.reduce(k, vals[k].rep())
    }

    fn widen(&mut self, rep: &Rep) -> bool {
        let mut grew = false;
        for (m, c) in rep.terms() {
            let d = c.den();
            let cur = self.dens.entry(m.clone()).or_insert_with(Poly::one);
            if cur.div_exact(d).is_none() {
                *cur = lcm(cur, d);
                grew = true;
            }
        }
        grew
    }

    fn vector(&self, rep: &Rep) -> BTreeMap<Key, Rational> {
        let mut out = BTreeMap::new();
        for (m, c) in rep.terms() {
            let l = &self.dens[m];
            let scaled = c
                .num()
                .mul(&l.div_exact(c.den()).expect("denominator divides lcm"));
            for (bm, coef) in scaled.terms() {
                out.insert((m.clone(), bm.clone()), coef.clone());
            }
        }
        out
    }

    fn reduce(&mut self, k: usize, rep: &Rep) -> Option<BTreeMap<usize, Rational>> {
        let mut vec = self.vector(rep);
        let mut combo = BTreeMap::from([(k, Rational::one())]);
        while let Some((key, lead)) = vec.iter().next_back().map(|(k, c)| (k.clone(), c.clone())) {
            let Some(&r) = self.pivot.get(&key) else {
                self.pivot.insert(key, self.rows.len());
                self.rows.push(Row { vec, combo });
                return None;
            };
            let row = &self.rows[r];
            let f = lead / &row.vec[&key];
            axpy(&mut vec, &f, &row.vec);
            axpy(&mut combo, &f, &row.combo);
        }
        Some(combo)
    }
}

/// `y -= f * x`, dropping zeros.
fn axpy<K: Ord + Clone>(y: &mut BTreeMap<K, Rational>, f: &Rational, x: &BTreeMap<K, Rational>) {
    for (k, c) in x {
        let t = f * c;
        match y.get_mut(k) {
            Some(v) => {
                *v -= t;
                if v.is_zero() {
                    y.remove(k);
                }
            }
            None => {
                y.insert(k.clone(), -t);
            }
        }
    }
}
