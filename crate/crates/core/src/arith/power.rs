//! Deciding whether a base-field element is a `q`-th power in a tower.
//!
//! For `c` in `F = Q(x0, x1, ...)` and a tower `K = F(r1^(1/q), ..., rk^(1/q))`
//! (radicals of other prime exponents do not matter, their degrees are prime
//! to `q`), `c` is a `q`-th power in `K` exactly when `c` lies in the subgroup
//! of `F*` generated by `F*^q` and the `ri`. Modulo `q`-th powers, `F*` is a
//! free `F_q`-module on positive integer primes and monic irreducible
//! polynomials (`-1` is a `q`-th power since `q` is odd), so membership reduces
//! to linear algebra over `F_q` once all the data is written in a common
//! coprime basis. No factorization is needed.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::element::{FieldElement, Rep};
use super::gcd::{gcd, is_qth_power_up_to_unit};
use super::poly::Poly;
use super::ratfn::RatFn;
use super::tower::{GeneratorKind, Tower};
use super::ArithError;

/// Whether `c` is a `q`-th power in its own tower.
pub fn qth_power_test(c: &FieldElement, q: u32) -> Result<bool, ArithError> {
    if c.is_zero() {
        return Err(ArithError::DegenerateRadicand);
    }
    rep_in_qth_power_group(c.tower(), c.rep(), q)
}

pub(crate) fn rep_in_qth_power_group(tower: &Tower, c: &Rep, q: u32) -> Result<bool, ArithError> {
    let c = c.as_base().ok_or(ArithError::UnsupportedRadicand)?;
    let mut items = same_q_radicands(tower, q)?;
    items.push(c);
    let vectors = exponent_vectors(&items, q);
    let (target, gens) = vectors.split_last().expect("at least the target");
    Ok(in_span(gens, target, q))
}

/// Whether the `q`-exponent radicals of the tower are independent modulo
/// `q`-th powers, i.e. the tower really has degree `q^k` over its base.
pub(crate) fn radicals_independent(tower: &Tower, q: u32) -> Result<bool, ArithError> {
    let items = same_q_radicands(tower, q)?;
    let vectors = exponent_vectors(&items, q);
    Ok(rank(vectors, q) == items.len())
}

fn same_q_radicands(tower: &Tower, q: u32) -> Result<Vec<RatFn>, ArithError> {
    let mut out = Vec::new();
    for g in tower.generators() {
        if let GeneratorKind::Radical { q: e, radicand } = &g.kind {
            if *e == q {
                out.push(radicand.as_base().ok_or(ArithError::UnsupportedRadicand)?);
            }
        }
    }
    Ok(out)
}

/// Signed atoms of one base-field element: integers and monic polynomials
/// with multiplicity `+1` or `-1`.
struct Atoms {
    ints: Vec<(BigInt, i64)>,
    polys: Vec<(Poly, i64)>,
}

fn atoms(r: &RatFn) -> Atoms {
    let lc = r.num().leading_coeff();
    let mut ints = Vec::new();
    let n = lc.numer().abs();
    if !n.is_one() {
        ints.push((n, 1));
    }
    if !lc.denom().is_one() {
        ints.push((lc.denom().clone(), -1));
    }
    let mut polys = Vec::new();
    let num = r.num().monic();
    if !num.is_constant() {
        polys.push((num, 1));
    }
    if !r.den().is_constant() {
        polys.push((r.den().clone(), -1));
    }
    Atoms { ints, polys }
}

/// Pairwise coprime set such that every input is a product of its members.
fn coprime_basis<T: Clone>(
    items: Vec<T>,
    gcd: impl Fn(&T, &T) -> T,
    div: impl Fn(&T, &T) -> T,
    is_unit: impl Fn(&T) -> bool,
) -> Vec<T> {
    let mut basis: Vec<T> = items.into_iter().filter(|t| !is_unit(t)).collect();
    'outer: loop {
        for i in 0..basis.len() {
            for j in i + 1..basis.len() {
                let g = gcd(&basis[i], &basis[j]);
                if is_unit(&g) {
                    continue;
                }
                let a = div(&basis[i], &g);
                let b = div(&basis[j], &g);
                basis.swap_remove(j);
                basis.swap_remove(i);
                basis.extend([a, b, g].into_iter().filter(|t| !is_unit(t)));
                continue 'outer;
            }
        }
        return basis;
    }
}

fn valuation<T: Clone>(mut a: T, b: &T, try_div: impl Fn(&T, &T) -> Option<T>) -> i64 {
    let mut k = 0;
    while let Some(next) = try_div(&a, b) {
        a = next;
        k += 1;
    }
    k
}

fn is_int_qth_power(n: &BigInt, q: u32) -> bool {
    let r = n.nth_root(q);
    num_traits::pow(r, q as usize) == *n
}

fn exponent_vectors(items: &[RatFn], q: u32) -> Vec<Vec<u64>> {
    let decomposed: Vec<Atoms> = items.iter().map(atoms).collect();

    let all_ints = decomposed
        .iter()
        .flat_map(|a| a.ints.iter().map(|(n, _)| n.clone()))
        .collect();
    let int_basis: Vec<BigInt> =
        coprime_basis(all_ints, |a, b| a.gcd(b), |a, b| a / b, |a| a.is_one())
            .into_iter()
            .filter(|b| !is_int_qth_power(b, q))
            .collect();

    let all_polys = decomposed
        .iter()
        .flat_map(|a| a.polys.iter().map(|(p, _)| p.clone()))
        .collect();
    let poly_basis: Vec<Poly> = coprime_basis(
        all_polys,
        gcd,
        |a, b| a.div_exact(b).expect("gcd divides"),
        |p| p.is_constant(),
    )
    .into_iter()
    .filter(|p| !is_qth_power_up_to_unit(p, q))
    .collect();

    let qm = q as i64;
    decomposed
        .iter()
        .map(|a| {
            let mut v = Vec::with_capacity(int_basis.len() + poly_basis.len());
            for b in &int_basis {
                let e: i64 = a
                    .ints
                    .iter()
                    .map(|(n, s)| {
                        s * valuation(n.clone(), b, |x, y| {
                            let (d, r) = x.div_rem(y);
                            r.is_zero().then_some(d)
                        })
                    })
                    .sum();
                v.push(e.rem_euclid(qm) as u64);
            }
            for b in &poly_basis {
                let e: i64 = a
                    .polys
                    .iter()
                    .map(|(p, s)| s * valuation(p.clone(), b, |x, y| x.div_exact(y)))
                    .sum();
                v.push(e.rem_euclid(qm) as u64);
            }
            v
        })
        .collect()
}

fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    (a as u128 * b as u128 % q as u128) as u64
}

fn inv_mod(a: u64, q: u64) -> u64 {
    let mut r = 1;
    let mut b = a % q;
    let mut e = q - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, q);
        }
        b = mul_mod(b, b, q);
        e >>= 1;
    }
    r
}

/// Row-reduces `rows` over `F_q`; returns pivoted rows as (pivot column, row).
fn echelon(rows: Vec<Vec<u64>>, q: u64) -> Vec<(usize, Vec<u64>)> {
    let mut pivots: Vec<(usize, Vec<u64>)> = Vec::new();
    for mut row in rows {
        reduce(&mut row, &pivots, q);
        if let Some(col) = row.iter().position(|&x| x != 0) {
            let s = inv_mod(row[col], q);
            row.iter_mut().for_each(|x| *x = mul_mod(*x, s, q));
            pivots.push((col, row));
        }
    }
    pivots
}

fn reduce(row: &mut [u64], pivots: &[(usize, Vec<u64>)], q: u64) {
    for (col, p) in pivots {
        let f = row[*col];
        if f != 0 {
            for (x, y) in row.iter_mut().zip(p) {
                *x = (*x + q - mul_mod(f, *y, q)) % q;
            }
        }
    }
}

fn rank(rows: Vec<Vec<u64>>, q: u32) -> usize {
    echelon(rows, q as u64).len()
}

fn in_span(gens: &[Vec<u64>], target: &[u64], q: u32) -> bool {
    let pivots = echelon(gens.to_vec(), q as u64);
    let mut t = target.to_vec();
    reduce(&mut t, &pivots, q as u64);
    t.iter().all(|&x| x == 0)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::arith::{Generator, Rational};

    fn int(n: i64) -> Rep {
        Rep::base(RatFn::constant(Rational::from_integer(n.into())))
    }

    #[test]
    fn rational_powers() {
        let t = Tower::new();
        assert!(rep_in_qth_power_group(&t, &int(32), 5).unwrap());
        assert!(rep_in_qth_power_group(&t, &int(-243), 5).unwrap());
        assert!(!rep_in_qth_power_group(&t, &int(2), 5).unwrap());
        assert!(!rep_in_qth_power_group(&t, &int(64), 5).unwrap());
        let r = Rep::base(RatFn::constant(Rational::new(32.into(), 243.into())));
        assert!(rep_in_qth_power_group(&t, &r, 5).unwrap());
    }

    #[test]
    fn polynomial_powers() {
        let t = Tower::new().adjoin_transcendental("x").unwrap();
        let x = Poly::var(0);
        let p = x
            .add(&Poly::one())
            .pow(5)
            .scale(&Rational::from_integer(32.into()));
        assert!(rep_in_qth_power_group(&t, &Rep::base(RatFn::from_poly(p)), 5).unwrap());
        let c = Poly::one().sub(&x.pow(5));
        assert!(!rep_in_qth_power_group(&t, &Rep::base(RatFn::from_poly(c)), 5).unwrap());
    }

    #[test]
    fn existing_radicals_count() {
        // With 6^(1/5) and 2^(1/5) present, 3 and 12 become fifth powers.
        let t = Tower::new()
            .adjoin(Generator::radical("a", 5, int(6)))
            .unwrap()
            .adjoin(Generator::radical("b", 5, int(2)))
            .unwrap();
        assert!(rep_in_qth_power_group(&t, &int(3), 5).unwrap());
        assert!(rep_in_qth_power_group(&t, &int(12), 5).unwrap());
        assert!(!rep_in_qth_power_group(&t, &int(5), 5).unwrap());
        // Different exponent: 2 is not a seventh power.
        assert!(!rep_in_qth_power_group(&t, &int(2), 7).unwrap());
        let dup = Tower::new()
            .adjoin(Generator::radical("a", 5, int(2)))
            .unwrap()
            .adjoin(Generator::radical("b", 5, int(16)));
        assert!(matches!(dup, Err(ArithError::ReducibleRelation(l)) if l == "b"));
        let a = Arc::new(t);
        let e = FieldElement::integer(&a, 48);
        assert!(qth_power_test(&e, 5).unwrap());
        assert_eq!(
            qth_power_test(&FieldElement::zero(&a), 5),
            Err(ArithError::DegenerateRadicand)
        );
    }
}
