//! Multivariate gcd over Q by recursive content / primitive-part extraction
//! and primitive pseudo-remainder sequences.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};

use super::poly::{Monomial, Poly, Var};

/// Greatest common divisor, normalized monic (leading coefficient one under
/// the lex order). `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if let Some((m, _)) = a.as_monomial() {
        return monomial_gcd(m, b);
    }
    if let Some((m, _)) = b.as_monomial() {
        return monomial_gcd(m, a);
    }
    if a == b {
        return a.monic();
    }
    let mut vars = a.vars();
    vars.extend(b.vars());
    vars.sort_unstable();
    vars.dedup();
    // A variable present in only one argument lives in the content there.
    let va = a.vars();
    let vb = b.vars();
    if let Some(&v) = va.iter().find(|v| !vb.contains(v)) {
        let c = content_in(a, v);
        return gcd(&c, b);
    }
    if let Some(&v) = vb.iter().find(|v| !va.contains(v)) {
        let c = content_in(b, v);
        return gcd(a, &c);
    }
    if coprime_mod_p(a, b, &vars) {
        return Poly::one();
    }
    let (_, pa) = a.integer_content();
    let (_, pb) = b.integer_content();
    if let Some(h) = heuristic(&pa, &pb, &vars) {
        return h.monic();
    }
    let v = *vars
        .last()
        .expect("non-constant polynomials have variables");
    gcd_in(a, b, v).monic()
}

fn max_norm(p: &Poly) -> BigInt {
    p.terms()
        .map(|(_, c)| c.numer().abs())
        .max()
        .unwrap_or_default()
}

/// Heuristic gcd of integer polynomials: evaluate one variable at a large
/// integer, recurse, and rebuild the candidate from its balanced digits.
/// Candidates are accepted only if they divide both inputs. Returns the gcd
/// in `Z[vars]` including the integer content, or `None` after six failed
/// evaluation points.
fn heuristic(f: &Poly, g: &Poly, vars: &[Var]) -> Option<Poly> {
    let (cf, f) = f.integer_content();
    let (cg, g) = g.integer_content();
    let c = super::q::gcd(cf.numer(), cg.numer());
    let c = BigRational::from_integer(c);
    if f.is_constant() || g.is_constant() {
        return Some(Poly::constant(c));
    }
    let live: Vec<Var> = vars
        .iter()
        .copied()
        .filter(|&v| f.degree_in(v) > 0 || g.degree_in(v) > 0)
        .collect();
    let (&v, rest) = live.split_first()?;
    let bound = f.degree_in(v).min(g.degree_in(v));
    let b = max_norm(&f).min(max_norm(&g));
    let lc_ratio = |p: &Poly| max_norm(p) / p.leading_coeff().numer().abs();
    let mut xi: BigInt = (BigInt::from(2) * &b + 29u32)
        .min(BigInt::from(99) * b.sqrt())
        .max(BigInt::from(2) * lc_ratio(&f).min(lc_ratio(&g)) + 4);
    for _ in 0..6 {
        let at = BigRational::from_integer(xi.clone());
        let ff = f.eval_var(v, &at);
        let gg = g.eval_var(v, &at);
        if !ff.is_zero() && !gg.is_zero() {
            let h = heuristic(&ff, &gg, rest)?;
            if let Some(cand) = interpolate(h, &xi, v, bound) {
                let (_, cand) = cand.integer_content();
                if !cand.is_zero() && f.div_exact(&cand).is_some() && g.div_exact(&cand).is_some() {
                    return Some(cand.scale(&c));
                }
            }
        }
        xi = &xi * 73794u32 * xi.sqrt().sqrt() / 27011u32;
    }
    None
}

/// `sum h_i v^i` from the balanced base-`xi` digits of `h`'s coefficients.
fn interpolate(mut h: Poly, xi: &BigInt, v: Var, bound: u32) -> Option<Poly> {
    let half = xi / 2;
    let xr = BigRational::from_integer(xi.clone()).recip();
    let mut out = Poly::zero();
    let mut i = 0;
    while !h.is_zero() {
        if i > bound {
            return None;
        }
        let digit = Poly::from_terms(h.terms().map(|(m, c)| {
            let mut r = c.numer().mod_floor(xi);
            if r > half {
                r -= xi;
            }
            (m.clone(), BigRational::from_integer(r))
        }));
        h = h.sub(&digit).scale(&xr);
        out = out.add(&digit.mul_monomial(&Monomial::var(v, i), &BigRational::one()));
        i += 1;
    }
    Some(out)
}

const P: u64 = (1 << 61) - 1;

fn mulm(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn powm(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulm(r, b);
        }
        b = mulm(b, b);
        e >>= 1;
    }
    r
}

fn invm(a: u64) -> u64 {
    powm(a, P - 2)
}

fn residue(n: &num_bigint::BigInt) -> u64 {
    use num_traits::ToPrimitive;
    let m = num_bigint::BigInt::from(P);
    let r = ((n % &m) + &m) % &m;
    r.to_u64().expect("reduced below p")
}

/// Image of the primitive integer associate of `p` in `F_p[v]`, other
/// variables evaluated at fixed points. Dense, lowest degree first.
fn image(p: &Poly, v: Var, point: &dyn Fn(Var) -> u64) -> Vec<u64> {
    let coeffs = p.integer_coefficients();
    let mut out = vec![0u64; p.degree_in(v) as usize + 1];
    for (m, c) in &coeffs {
        let mut t = residue(c);
        let mut e = 0;
        for w in m.vars() {
            if w == v {
                e = m.exponent(w);
            } else {
                t = mulm(t, powm(point(w), m.exponent(w) as u64));
            }
        }
        let slot = &mut out[e as usize];
        *slot = (*slot + t) % P;
    }
    while out.len() > 1 && *out.last().unwrap() == 0 {
        out.pop();
    }
    out
}

fn poly_gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
    let deg = |p: &Vec<u64>| {
        if p.iter().all(|&c| c == 0) {
            None
        } else {
            Some(p.len() - 1)
        }
    };
    loop {
        let Some(db) = deg(&b) else {
            return deg(&a).unwrap_or(0);
        };
        if db == 0 {
            return 0;
        }
        // a <- a mod b
        let il = invm(b[db]);
        while let Some(da) = deg(&a) {
            if da < db {
                break;
            }
            let f = mulm(a[da], il);
            for i in 0..=db {
                let s = mulm(f, b[i]);
                a[da - db + i] = (a[da - db + i] + P - s) % P;
            }
            while a.len() > 1 && *a.last().unwrap() == 0 {
                a.pop();
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
}

/// Sufficient test for `gcd(a, b) = 1`: for each variable, the images in
/// `F_p[v]` at a point where the leading coefficient of `a` survives have a
/// constant gcd. Any common factor would survive in some such image.
fn coprime_mod_p(a: &Poly, b: &Poly, vars: &[Var]) -> bool {
    let point = |w: Var| -> u64 { (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(w as u64 + 7) >> 4) % P };
    for &v in vars {
        let ia = image(a, v, &point);
        if ia.len() != a.degree_in(v) as usize + 1 {
            return false;
        }
        let ib = image(b, v, &point);
        if poly_gcd_degree(ia, ib) != 0 {
            return false;
        }
    }
    true
}

pub fn lcm(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() || b.is_zero() {
        return Poly::zero();
    }
    let g = gcd(a, b);
    a.div_exact(&g)
        .expect("gcd divides its argument")
        .mul(b)
        .monic()
}

fn monomial_gcd(m: &Monomial, p: &Poly) -> Poly {
    let mut g = m.clone();
    for (n, _) in p.terms() {
        g = g.gcd(n);
        if g.is_one() {
            break;
        }
    }
    Poly::monomial(g, num_rational::BigRational::from_integer(1.into()))
}

/// Gcd of the coefficients of `p` viewed as a polynomial in `v`.
pub fn content_in(p: &Poly, v: Var) -> Poly {
    let mut g = Poly::zero();
    for c in p.coefficients_in(v).values() {
        g = gcd(&g, c);
        if g.is_constant() && !g.is_zero() {
            return Poly::one();
        }
    }
    g
}

fn degree(c: &BTreeMap<u32, Poly>) -> Option<u32> {
    c.keys().next_back().copied()
}

fn primitive_part(c: &BTreeMap<u32, Poly>) -> BTreeMap<u32, Poly> {
    let mut g = Poly::zero();
    for p in c.values() {
        g = gcd(&g, p);
        if g.is_one() {
            break;
        }
    }
    if g.is_zero() || g.is_one() {
        return c.clone();
    }
    c.iter()
        .map(|(&e, p)| (e, p.div_exact(&g).expect("content divides coefficients")))
        .collect()
}

/// Pseudo-remainder of `a` by `b` in `R[v]`.
fn pseudo_rem(a: &BTreeMap<u32, Poly>, b: &BTreeMap<u32, Poly>) -> BTreeMap<u32, Poly> {
    let db = degree(b).expect("nonzero divisor");
    let lb = b[&db].clone();
    let mut r = a.clone();
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let lr = r[&dr].clone();
        let shift = dr - db;
        let mut next: BTreeMap<u32, Poly> = BTreeMap::new();
        for (&e, p) in &r {
            let t = p.mul(&lb);
            if !t.is_zero() {
                next.insert(e, t);
            }
        }
        for (&e, p) in b {
            let t = p.mul(&lr);
            let slot = next.entry(e + shift).or_default();
            *slot = slot.sub(&t);
        }
        next.retain(|_, p| !p.is_zero());
        r = next;
    }
    r
}

fn gcd_in(a: &Poly, b: &Poly, v: Var) -> Poly {
    let ca = a.coefficients_in(v);
    let cb = b.coefficients_in(v);
    let cont_a = content_of(&ca);
    let cont_b = content_of(&cb);
    let cont = gcd(&cont_a, &cont_b);
    let mut r0 = primitive_part(&ca);
    let mut r1 = primitive_part(&cb);
    if degree(&r0) < degree(&r1) {
        std::mem::swap(&mut r0, &mut r1);
    }
    loop {
        if r1.is_empty() {
            break;
        }
        if degree(&r1) == Some(0) {
            r0 = BTreeMap::from([(0, Poly::one())]);
            break;
        }
        let r = pseudo_rem(&r0, &r1);
        r0 = r1;
        r1 = if r.is_empty() { r } else { primitive_part(&r) };
    }
    let pp = Poly::from_coefficients_in(v, &r0);
    cont.mul(&pp)
}

fn content_of(c: &BTreeMap<u32, Poly>) -> Poly {
    let mut g = Poly::zero();
    for p in c.values() {
        g = gcd(&g, p);
        if g.is_one() {
            break;
        }
    }
    if g.is_zero() {
        Poly::one()
    } else {
        g
    }
}

/// Squarefree decomposition: returns `(multiplicity, factor)` pairs with
/// pairwise coprime, squarefree, monic factors and a rational unit such that
/// `p = unit * prod factor^multiplicity`.
pub fn squarefree_decomposition(p: &Poly) -> (num_rational::BigRational, Vec<(u32, Poly)>) {
    assert!(!p.is_zero());
    let unit = p.leading_coeff();
    let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
    squarefree_rec(&p.monic(), &mut out);
    let factors = out
        .into_iter()
        .filter(|(_, f)| !f.is_one())
        .collect::<Vec<_>>();
    (unit, factors)
}

fn squarefree_rec(p: &Poly, out: &mut BTreeMap<u32, Poly>) {
    let vars = p.vars();
    let Some(&v) = vars.first() else {
        return;
    };
    // p = content_v(p) * pp_v(p); the content does not involve v.
    let cont = content_in(p, v);
    let pp = p.div_exact(&cont).expect("content divides");
    squarefree_rec(&cont, out);
    for (k, f) in yun(&pp, v) {
        let slot = out.entry(k).or_insert_with(Poly::one);
        *slot = slot.mul(&f).monic();
    }
}

/// Yun's algorithm in variable `v` for a polynomial primitive in `v`.
fn yun(p: &Poly, v: Var) -> Vec<(u32, Poly)> {
    let mut out = Vec::new();
    let dp = p.derivative(v);
    if dp.is_zero() {
        return out;
    }
    let a0 = gcd(p, &dp);
    let mut b = p.div_exact(&a0).expect("gcd divides");
    let mut c = dp.div_exact(&a0).expect("gcd divides");
    let mut d = c.sub(&b.derivative(v));
    let mut k = 1;
    loop {
        if b.is_constant() {
            break;
        }
        let a = gcd(&b, &d);
        if !a.is_constant() {
            out.push((k, a.monic()));
        }
        b = b.div_exact(&a).expect("gcd divides");
        c = d.div_exact(&a).expect("gcd divides");
        d = c.sub(&b.derivative(v));
        k += 1;
    }
    out
}

/// True if some polynomial `r` has `r^q = p` up to a rational unit factor.
pub fn is_qth_power_up_to_unit(p: &Poly, q: u32) -> bool {
    if p.is_zero() {
        return true;
    }
    let (_, factors) = squarefree_decomposition(p);
    factors.iter().all(|(k, _)| k % q == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(v: Var) -> Poly {
        Poly::var(v)
    }

    #[test]
    fn univariate_gcd() {
        let a = x(0).pow(2).sub(&Poly::one());
        let b = x(0)
            .pow(2)
            .sub(&x(0).scale(&num_rational::BigRational::from_integer(2.into())))
            .add(&Poly::one());
        assert_eq!(gcd(&a, &b), x(0).sub(&Poly::one()));
    }

    #[test]
    fn multivariate_gcd_recovers_common_factor() {
        let g = x(0).mul(&x(1)).add(&x(2)).add(&Poly::one());
        let a = g.mul(&x(0).sub(&x(2)));
        let b = g.mul(&x(1).pow(2).add(&x(0)));
        assert_eq!(gcd(&a, &b), g.monic());
    }

    #[test]
    fn coprime_gives_one() {
        let a = Poly::one().sub(&x(0).pow(5));
        let b = Poly::one().sub(&x(1).pow(5));
        assert!(gcd(&a, &b).is_one());
        assert!(gcd(&a, &x(0)).is_one());
    }

    #[test]
    fn squarefree_exponents() {
        let f = x(0).add(&Poly::one());
        let g = x(1).sub(&x(0));
        let p = f
            .pow(5)
            .mul(&g.pow(2))
            .scale(&num_rational::BigRational::from_integer(7.into()));
        let (unit, fs) = squarefree_decomposition(&p);
        assert_eq!(unit, num_rational::BigRational::from_integer(7.into()));
        let ks: Vec<u32> = fs.iter().map(|(k, _)| *k).collect();
        assert_eq!(ks, vec![2, 5]);
        assert!(is_qth_power_up_to_unit(&f.pow(5).mul(&x(1).pow(10)), 5));
        assert!(!is_qth_power_up_to_unit(&Poly::one().sub(&x(0).pow(5)), 5));
    }
}
