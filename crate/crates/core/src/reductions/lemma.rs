use super::search::{search_elements, Bounds, Cutoff, Search, Witness, DEFAULT_MONOMIAL_LIMIT};
use super::{BasisEnumeration, ReductionError};
use crate::presentation::Presentation;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MembershipBounds {
    /// Most basis elements used together with the queried element.
    pub width: usize,
    pub degree: u32,
    pub height: u64,
    pub monomials: usize,
}

impl MembershipBounds {
    pub fn new(width: usize, degree: u32, height: u64) -> Self {
        MembershipBounds {
            width,
            degree,
            height,
            monomials: DEFAULT_MONOMIAL_LIMIT,
        }
    }
}

/// A conclusive answer with the annihilator that settled it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Membership {
    pub member: bool,
    /// Positions in the basis enumeration used alongside the element.
    pub positions: Vec<usize>,
    pub witness: Witness,
}

impl Membership {
    /// Variable names for the witness: `X` for the element, `Yk` for
    /// basis position `k`.
    pub fn names(&self) -> Vec<String> {
        std::iter::once("X".to_string())
            .chain(self.positions.iter().map(|k| format!("Y{k}")))
            .collect()
    }
}

fn degree_schedule(max: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 1;
    while d < max {
        out.push(d);
        d *= 2;
    }
    out.push(max);
    out
}

/// Combinations of `w` positions out of `0..m`, in lex order.
fn combinations(m: usize, w: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, m: usize, w: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == w {
            out.push(cur.clone());
            return;
        }
        for k in start..m {
            cur.push(k);
            go(k + 1, m, w, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, m, w, &mut Vec::new(), &mut out);
    out
}

/// Looks for an annihilator of the element together with a few basis
/// elements. Once one is found, the element is in the basis iff it is one
/// of the basis elements up to the largest position used.
///
/// Sub-tuples are tried by width, then by degree along a doubling schedule,
/// then in lex order, so low-degree relations are found before wide ones.
pub fn membership_via_basis(
    p: &Presentation,
    basis: &BasisEnumeration,
    idx: usize,
    bounds: MembershipBounds,
) -> Result<Membership, ReductionError> {
    if idx >= p.domain_size() {
        return Err(ReductionError::IndexOutOfRange(idx));
    }
    let x = p.interp(idx)?.clone();
    let mut b = Vec::with_capacity(basis.len());
    for &j in basis.emitted() {
        b.push(p.interp(j)?.clone());
    }
    let mut cutoff = None;
    for w in 0..=bounds.width.min(b.len()) {
        let subsets = combinations(b.len(), w);
        for d in degree_schedule(bounds.degree) {
            let search = Bounds {
                degree: d,
                height: bounds.height,
                monomials: bounds.monomials,
            };
            for s in &subsets {
                let mut tuple = vec![x.clone()];
                tuple.extend(s.iter().map(|&k| b[k].clone()));
                match search_elements(&tuple, search)? {
                    Search::Found(witness) => {
                        let upto = s.last().map_or(0, |&k| k + 1);
                        return Ok(Membership {
                            member: basis.emitted()[..upto].contains(&idx),
                            positions: s.clone(),
                            witness,
                        });
                    }
                    Search::Absent => {}
                    Search::Inconclusive(c) => cutoff = Some(c),
                }
            }
        }
    }
    let why = match cutoff {
        Some(Cutoff::Height) => "only over-height annihilators",
        Some(Cutoff::Monomials) => "monomial budget exhausted",
        None => "no annihilator within width and degree bounds",
    };
    Err(ReductionError::Inconclusive(format!(
        "membership of index {idx}: {why}"
    )))
}
