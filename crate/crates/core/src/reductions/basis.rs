use std::collections::HashMap;

use super::{BasisEnumeration, ReductionError, TranscendenceOracle};
use crate::arith::{FieldElement, Rep};
use crate::constructions::settling_stage;
use crate::presentation::Presentation;
use crate::schedules::{EnumerationSchedule, PhiTable};

/// Outcome of scanning the domain for a solution pair of one curve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveSearch {
    /// True when no pair qualified, i.e. the curve index is judged to be in
    /// the set. Only the dumped domain is scanned.
    pub in_set: bool,
    pub witness: Option<(usize, usize)>,
}

/// Dovetail rank of a pair: by the larger index, then lexicographically.
fn rank(a: usize, b: usize) -> (usize, usize, usize) {
    (a.max(b), a, b)
}

/// All pairs `(a, b)` with `x^q + y^q = 1` and `xy != 0`, in dovetail order.
fn solution_pairs(p: &Presentation, i: usize) -> Result<Vec<(usize, usize)>, ReductionError> {
    let q = p
        .family()
        .q32(i)
        .map_err(crate::presentation::PresentationError::from)?;
    let interp = p.interpretation()?;
    let Some(first) = interp.first() else {
        return Ok(Vec::new());
    };
    let one = FieldElement::one(first.tower());
    let mut powers: Vec<Option<FieldElement>> = Vec::with_capacity(interp.len());
    let mut by_power: HashMap<Rep, Vec<usize>> = HashMap::new();
    for (b, e) in interp.iter().enumerate() {
        if e.is_zero() {
            powers.push(None);
            continue;
        }
        let pw = e.pow(q);
        by_power.entry(pw.rep().clone()).or_default().push(b);
        powers.push(Some(pw));
    }
    let mut pairs = Vec::new();
    for (a, pw) in powers.iter().enumerate() {
        let Some(pw) = pw else { continue };
        let rest = one.sub(pw)?;
        if let Some(bs) = by_power.get(rest.rep()) {
            pairs.extend(bs.iter().map(|&b| (a, b)));
        }
    }
    pairs.sort_by_key(|&(a, b)| rank(a, b));
    Ok(pairs)
}

/// Decides `i` in C from the transcendence relation: `i` is outside C iff
/// some pair on curve `i` has a transcendental first coordinate. Trivial
/// solutions never count.
pub fn c_from_t(
    p: &Presentation,
    oracle: &dyn TranscendenceOracle,
    i: usize,
) -> Result<CurveSearch, ReductionError> {
    for (a, b) in solution_pairs(p, i)? {
        if oracle.is_transcendental(p, a)? {
            return Ok(CurveSearch {
                in_set: false,
                witness: Some((a, b)),
            });
        }
    }
    Ok(CurveSearch {
        in_set: true,
        witness: None,
    })
}

/// Number of plainly labeled curves `x0, x1, ...` in the ledger.
fn plain_curves(p: &Presentation) -> usize {
    (0..)
        .take_while(|k| p.entry(&format!("x{k}")).is_some())
        .count()
}

/// Last schedule stage a build of `p.stage()` stages consulted.
fn last_consulted(p: &Presentation) -> u64 {
    p.stage().saturating_sub(1)
}

/// For each curve index outside C, the first coordinate of the first
/// nontrivial solution pair. Later solutions of the same curve are
/// interalgebraic with it and skipped.
pub fn basis_from_c(
    p: &Presentation,
    c: &EnumerationSchedule,
) -> Result<BasisEnumeration, ReductionError> {
    let s = last_consulted(p);
    let mut out = BasisEnumeration::new();
    for i in 0..plain_curves(p) {
        if c.member_at(i as u64, s) {
            continue;
        }
        if let Some(&(a, b)) = solution_pairs(p, i)?.first() {
            out.emit(a, format!("curve {i} pair ({a}, {b})"));
        }
    }
    Ok(out)
}

/// `j` is in D iff the original `x{2j+1}` is not transcendental.
pub fn d_from_t(
    p: &Presentation,
    oracle: &dyn TranscendenceOracle,
    j: u64,
) -> Result<bool, ReductionError> {
    let idx = p.index_of_label(&format!("x{}", 2 * j + 1))?;
    Ok(!oracle.is_transcendental(p, idx)?)
}

/// Odd curves contribute the original or the primed label by D membership;
/// even curve `2i` contributes the generation live at its settling stage,
/// when the computation on `i` settles at all.
pub fn basis_from_d(
    p: &Presentation,
    d: &EnumerationSchedule,
    phi: &PhiTable,
) -> Result<BasisEnumeration, ReductionError> {
    let stages = p.stage();
    let mut out = BasisEnumeration::new();
    for k in 0..stages {
        if k % 2 == 1 {
            let j = k / 2;
            let (label, why) = if d.member_at(j, last_consulted(p)) {
                (format!("x{k}'"), format!("{j} in D"))
            } else {
                (format!("x{k}"), format!("{j} not in D"))
            };
            out.emit(p.index_of_label(&label)?, why);
            continue;
        }
        let i = k / 2;
        let Some(settle) = settling_stage(phi, d, i, stages) else {
            continue;
        };
        let prefix = format!("x{k},");
        let live = p
            .ledger()
            .iter()
            .filter_map(|e| {
                let t: u64 = e.label.strip_prefix(&prefix)?.parse().ok()?;
                let born = if t == 0 { k + 1 } else { t };
                (born <= settle).then_some((born, e.index, e.label.as_str()))
            })
            .max();
        if let Some((_, idx, label)) = live {
            out.emit(idx, format!("{label} settled at stage {settle}"));
        }
    }
    Ok(out)
}
