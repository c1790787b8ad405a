//! Oracle computations over built presentations: transcendence oracles,
//! annihilator search, basis-driven membership and the set recoveries.

use std::fmt;

use thiserror::Error;

use crate::arith::ArithError;
use crate::presentation::{Presentation, PresentationError};

mod basis;
mod lemma;
mod search;

pub use basis::{basis_from_c, basis_from_d, c_from_t, d_from_t, CurveSearch};
pub use lemma::{membership_via_basis, Membership, MembershipBounds};
pub use search::{annihilator_search, search_elements, Bounds, Cutoff, Search, Witness};

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("index {0} is outside the domain")]
    IndexOutOfRange(usize),
    #[error("empty tuple")]
    EmptyTuple,
    #[error("witness does not annihilate the tuple")]
    WitnessFailed,
    #[error("inconclusive: {0}")]
    Inconclusive(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Transcendental,
    Algebraic,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Transcendental => "transcendental",
            Verdict::Algebraic => "algebraic",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Decides membership of domain elements in the transcendence relation.
pub trait TranscendenceOracle {
    fn verdict(&self, p: &Presentation, idx: usize) -> Result<Verdict, ReductionError>;

    /// The verdict as a yes/no answer; an inconclusive verdict is an error.
    fn is_transcendental(&self, p: &Presentation, idx: usize) -> Result<bool, ReductionError> {
        match self.verdict(p, idx)? {
            Verdict::Transcendental => Ok(true),
            Verdict::Algebraic => Ok(false),
            Verdict::Inconclusive => Err(ReductionError::Inconclusive(format!(
                "transcendence of index {idx}"
            ))),
        }
    }
}

/// Reads transcendence off the tower: an element is algebraic over Q iff
/// its normal form uses no transcendental generator, directly or through a
/// radicand.
#[derive(Debug, Clone, Copy, Default)]
pub struct Structural;

impl TranscendenceOracle for Structural {
    fn verdict(&self, p: &Presentation, idx: usize) -> Result<Verdict, ReductionError> {
        Ok(if ground_truth_t(p, idx)? {
            Verdict::Transcendental
        } else {
            Verdict::Algebraic
        })
    }
}

/// Searches for a univariate annihilator. Finding none within the degree
/// bound counts as transcendental; that is a bounded claim only.
#[derive(Debug, Clone, Copy)]
pub struct BoundedSearch {
    pub bounds: Bounds,
}

impl TranscendenceOracle for BoundedSearch {
    fn verdict(&self, p: &Presentation, idx: usize) -> Result<Verdict, ReductionError> {
        Ok(match annihilator_search(p, &[idx], self.bounds)? {
            Search::Found(_) => Verdict::Algebraic,
            Search::Absent => Verdict::Transcendental,
            Search::Inconclusive(_) => Verdict::Inconclusive,
        })
    }
}

pub fn ground_truth_t(p: &Presentation, idx: usize) -> Result<bool, ReductionError> {
    if idx >= p.domain_size() {
        return Err(ReductionError::IndexOutOfRange(idx));
    }
    Ok(!p.interp(idx)?.is_algebraic_over_q())
}

/// A tuple and the bounds for an independence check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndependenceQuery {
    pub tuple: Vec<usize>,
    pub bounds: Bounds,
}

impl IndependenceQuery {
    pub fn new(tuple: Vec<usize>, bounds: Bounds) -> Result<Self, ReductionError> {
        if tuple.is_empty() {
            return Err(ReductionError::EmptyTuple);
        }
        Ok(IndependenceQuery { tuple, bounds })
    }

    pub fn run(&self, p: &Presentation) -> Result<Search, ReductionError> {
        annihilator_search(p, &self.tuple, self.bounds)
    }
}

/// Indices emitted into a basis, each with a note saying why.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BasisEnumeration {
    emitted: Vec<usize>,
    provenance: Vec<String>,
}

impl BasisEnumeration {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends `idx`; repeated indices are ignored and reported as false.
    pub fn emit(&mut self, idx: usize, why: impl Into<String>) -> bool {
        if self.emitted.contains(&idx) {
            return false;
        }
        self.emitted.push(idx);
        self.provenance.push(why.into());
        true
    }

    pub fn emitted(&self) -> &[usize] {
        &self.emitted
    }

    pub fn provenance(&self) -> impl Iterator<Item = (usize, &str)> {
        self.emitted
            .iter()
            .copied()
            .zip(self.provenance.iter().map(String::as_str))
    }

    pub fn len(&self) -> usize {
        self.emitted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.emitted.is_empty()
    }
}

impl FromIterator<usize> for BasisEnumeration {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut b = BasisEnumeration::new();
        for idx in iter {
            b.emit(idx, "given");
        }
        b
    }
}

impl fmt::Display for BasisEnumeration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, why) in self.provenance() {
            writeln!(f, "{idx} {why}")?;
        }
        Ok(())
    }
}
