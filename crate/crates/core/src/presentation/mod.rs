//! Finite-stage presentations: an append-only diagram of `+` and `*` facts
//! over domain `0..n`, with each index interpreted in a tower field.

mod dump;
mod verify;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use thiserror::Error;

use crate::arith::{ArithError, FieldElement, Generator, RatFn, Rational, Rep, Tower};
use crate::curves::{CurveError, CurveFamily, Policy};

pub use verify::{verify, Report, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("presentation has no interpretation section")]
    NoInterpretation,
    #[error("invalid recipe: {0}")]
    InvalidRecipe(String),
    #[error("no admissible rational value found for `{0}`")]
    RationalizeExhausted(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FactKind {
    Add,
    Mul,
}

/// `a + b = c` or `a * b = c` on domain indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fact {
    pub kind: FactKind,
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.kind {
            FactKind::Add => "add",
            FactKind::Mul => "mul",
        };
        write!(f, "{op} {} {} {}", self.a, self.b, self.c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelStatus {
    /// The named constants 0 and 1.
    Constant,
    Transcendental,
    Radical {
        q: u32,
    },
    Rationalized(Rational),
}

impl fmt::Display for LabelStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelStatus::Constant => write!(f, "constant"),
            LabelStatus::Transcendental => write!(f, "transcendental"),
            LabelStatus::Radical { q } => write!(f, "radical q={q}"),
            LabelStatus::Rationalized(a) => write!(f, "rationalized a={}/{}", a.numer(), a.denom()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LedgerEntry {
    pub label: String,
    pub index: usize,
    pub status: LabelStatus,
}

/// Something a builder schedules for one stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    AdjoinCurve {
        curve: usize,
        label_x: String,
        label_y: String,
    },
    AdjoinTranscendental {
        label: String,
    },
    Rationalize {
        label: String,
    },
}

/// Position in the closure dovetail: level `m` covers every operation whose
/// largest argument is `m`, in the order `a+m`, `a*m` for `a = 0..=m`, then
/// `-m`, then `1/m`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Cursor {
    pub level: usize,
    pub step: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Request {
    Add(usize, usize),
    Mul(usize, usize),
    Neg(usize),
    Inv(usize),
}

impl Cursor {
    fn request(&self) -> Request {
        let m = self.level;
        let k = self.step;
        if k < 2 * (m + 1) {
            let a = k / 2;
            if k % 2 == 0 {
                Request::Add(a, m)
            } else {
                Request::Mul(a, m)
            }
        } else if k == 2 * (m + 1) {
            Request::Neg(m)
        } else {
            Request::Inv(m)
        }
    }

    fn advance(&mut self) {
        self.step += 1;
        if self.step > 2 * (self.level + 1) + 1 {
            self.level += 1;
            self.step = 0;
        }
    }
}

pub const DEFAULT_CLOSURE_STEPS: usize = 1;
const RATIONALIZE_LIMIT: i64 = 10_000;

#[derive(Debug, Clone)]
pub struct Presentation {
    policy: Policy,
    stage: u64,
    domain_size: usize,
    facts: Vec<Fact>,
    /// Empty for presentations loaded without their debug section.
    interp: Vec<FieldElement>,
    index_of: HashMap<Rep, usize>,
    tower: Arc<Tower>,
    ledger: Vec<LedgerEntry>,
    cursor: Cursor,
    closure_steps: usize,
}

impl Presentation {
    /// Domain `{0, 1}` interpreted as the field's zero and one.
    pub fn new(policy: Policy) -> Self {
        let tower = Arc::new(Tower::new());
        let mut p = Presentation {
            policy,
            stage: 0,
            domain_size: 0,
            facts: Vec::new(),
            interp: Vec::new(),
            index_of: HashMap::new(),
            tower: tower.clone(),
            ledger: Vec::new(),
            cursor: Cursor::default(),
            closure_steps: DEFAULT_CLOSURE_STEPS,
        };
        let zero = p.intern(FieldElement::zero(&tower));
        let one = p.intern(FieldElement::one(&tower));
        p.ledger.push(LedgerEntry {
            label: "zero".into(),
            index: zero,
            status: LabelStatus::Constant,
        });
        p.ledger.push(LedgerEntry {
            label: "one".into(),
            index: one,
            status: LabelStatus::Constant,
        });
        p.facts.push(Fact {
            kind: FactKind::Mul,
            a: one,
            b: one,
            c: one,
        });
        p
    }

    pub fn with_closure_steps(mut self, n: usize) -> Self {
        self.closure_steps = n;
        self
    }

    pub fn policy(&self) -> Policy {
        self.policy
    }

    pub fn stage(&self) -> u64 {
        self.stage
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn facts(&self) -> &[Fact] {
        &self.facts
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn ledger(&self) -> &[LedgerEntry] {
        &self.ledger
    }

    pub fn cursor(&self) -> Cursor {
        self.cursor
    }

    pub fn family(&self) -> CurveFamily {
        CurveFamily::new(self.policy)
    }

    pub fn has_interpretation(&self) -> bool {
        self.interp.len() == self.domain_size
    }

    pub fn interpretation(&self) -> Result<&[FieldElement], PresentationError> {
        if self.has_interpretation() {
            Ok(&self.interp)
        } else {
            Err(PresentationError::NoInterpretation)
        }
    }

    pub fn interp(&self, idx: usize) -> Result<&FieldElement, PresentationError> {
        self.interpretation()?
            .get(idx)
            .ok_or(PresentationError::NoInterpretation)
    }

    pub fn entry(&self, label: &str) -> Option<&LedgerEntry> {
        self.ledger.iter().find(|e| e.label == label)
    }

    pub fn index_of_label(&self, label: &str) -> Result<usize, PresentationError> {
        self.entry(label)
            .map(|e| e.index)
            .ok_or_else(|| ArithError::UnknownLabel(label.to_string()).into())
    }

    /// Index holding `value`, if any.
    pub fn find_value(&self, value: &FieldElement) -> Option<usize> {
        self.index_of.get(value.rep()).copied()
    }

    fn intern(&mut self, value: FieldElement) -> usize {
        if let Some(&i) = self.index_of.get(value.rep()) {
            return i;
        }
        let i = self.interp.len();
        self.index_of.insert(value.rep().clone(), i);
        self.interp.push(value);
        self.domain_size = self.interp.len();
        i
    }

    fn record(&mut self, kind: FactKind, a: usize, b: usize, value: FieldElement) -> usize {
        let c = self.intern(value);
        self.facts.push(Fact { kind, a, b, c });
        c
    }

    fn require_interp(&self) -> Result<(), PresentationError> {
        if self.has_interpretation() {
            Ok(())
        } else {
            Err(PresentationError::NoInterpretation)
        }
    }

    fn check_label_free(&self, label: &str) -> Result<(), PresentationError> {
        if self.entry(label).is_some() || self.tower.find(label).is_some() {
            return Err(ArithError::DuplicateLabel(label.to_string()).into());
        }
        Ok(())
    }

    fn embed_all(&mut self, tower: Tower) -> Result<(), PresentationError> {
        let tower = Arc::new(tower);
        for e in &mut self.interp {
            *e = e.embed(&tower)?;
        }
        self.tower = tower;
        Ok(())
    }

    pub fn adjoin_transcendental(&mut self, label: &str) -> Result<usize, PresentationError> {
        self.require_interp()?;
        self.check_label_free(label)?;
        let tower = self.tower.adjoin_transcendental(label)?;
        self.embed_all(tower)?;
        let t = FieldElement::generator(&self.tower, label)?;
        let idx = self.intern(t);
        self.ledger.push(LedgerEntry {
            label: label.to_string(),
            index: idx,
            status: LabelStatus::Transcendental,
        });
        Ok(idx)
    }

    /// Adjoins a fresh point `(x, y)` on curve `i`: `x` transcendental and
    /// `y^q = 1 - x^q`. The facts computing `x^q`, `y^q` and
    /// `x^q + y^q = 1` are recorded immediately.
    pub fn adjoin_curve_pair(
        &mut self,
        i: usize,
        label_x: &str,
        label_y: &str,
    ) -> Result<(usize, usize), PresentationError> {
        self.require_interp()?;
        self.check_label_free(label_x)?;
        self.check_label_free(label_y)?;
        if label_x == label_y {
            return Err(ArithError::DuplicateLabel(label_y.to_string()).into());
        }
        let q = self.family().q32(i)?;
        let with_x = self.tower.adjoin_transcendental(label_x)?;
        let x_id = with_x.find(label_x).expect("just adjoined");
        let xq = crate::arith::Poly::var(x_id).pow(q);
        let radicand = Rep::base(RatFn::from_poly(crate::arith::Poly::one().sub(&xq)));
        let tower = with_x.adjoin(Generator::radical(label_y, q, radicand))?;
        self.embed_all(tower)?;

        let x = FieldElement::generator(&self.tower, label_x)?;
        let y = FieldElement::generator(&self.tower, label_y)?;
        let ix = self.intern(x.clone());
        let iy = self.intern(y.clone());
        self.ledger.push(LedgerEntry {
            label: label_x.to_string(),
            index: ix,
            status: LabelStatus::Transcendental,
        });
        self.ledger.push(LedgerEntry {
            label: label_y.to_string(),
            index: iy,
            status: LabelStatus::Radical { q },
        });
        let ixq = self.power_chain(ix, &x, q)?;
        let iyq = self.power_chain(iy, &y, q)?;
        let sum = self.interp[ixq].add(&self.interp[iyq])?;
        self.record(FactKind::Add, ixq, iyq, sum);
        Ok((ix, iy))
    }

    /// Records `g * g^(k-1) = g^k` for `k = 2..=q`; returns the index of `g^q`.
    fn power_chain(
        &mut self,
        ig: usize,
        g: &FieldElement,
        q: u32,
    ) -> Result<usize, PresentationError> {
        let mut prev = ig;
        for _ in 2..=q {
            let v = g.mul(&self.interp[prev])?;
            prev = self.record(FactKind::Mul, ig, prev, v);
        }
        Ok(prev)
    }

    /// Replaces transcendental `label` by the first admissible integer
    /// `2, 3, 4, ...`: the tower must stay well formed, no interpreted
    /// element may become undefined, and distinct indices must stay distinct.
    pub fn rationalize(&mut self, label: &str) -> Result<Rational, PresentationError> {
        self.require_interp()?;
        let id = self
            .tower
            .find(label)
            .ok_or_else(|| ArithError::UnknownLabel(label.to_string()))?;
        if self.tower.generator(id).kind != crate::arith::GeneratorKind::Transcendental {
            return Err(ArithError::NotTranscendental(label.to_string()).into());
        }
        for a in 2..=RATIONALIZE_LIMIT {
            let value = Rational::from_integer(BigInt::from(a));
            if let Some((tower, changed)) = self.try_value(id, label, &value)? {
                self.tower = tower;
                for (i, _) in &changed {
                    self.index_of.remove(self.interp[*i].rep());
                }
                for e in self.interp.iter_mut() {
                    *e = FieldElement::from_rep(self.tower.clone(), e.rep().clone());
                }
                for (i, img) in changed {
                    self.index_of.insert(img.rep().clone(), i);
                    self.interp[i] = img;
                }
                if let Some(entry) = self.ledger.iter_mut().find(|e| e.label == label) {
                    entry.status = LabelStatus::Rationalized(value.clone());
                }
                return Ok(value);
            }
        }
        Err(PresentationError::RationalizeExhausted(label.to_string()))
    }

    /// Specializes `label` to `value` and returns the new tower with the
    /// images of the elements that change, or None if the value is unusable.
    /// Elements free of the variable keep their reps, so only the changed
    /// ones can collide.
    #[allow(clippy::type_complexity)]
    fn try_value(
        &self,
        id: crate::arith::Var,
        label: &str,
        value: &Rational,
    ) -> Result<Option<(Arc<Tower>, Vec<(usize, FieldElement)>)>, PresentationError> {
        let tower = match self.tower.specialize(label, value) {
            Ok(t) => Arc::new(t),
            Err(
                ArithError::ReducibleRelation(_)
                | ArithError::DegenerateRadicand
                | ArithError::SubstitutionSingularity(_),
            ) => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let touched: Vec<usize> = (0..self.interp.len())
            .filter(|&i| self.interp[i].rep().contains_base_var(id))
            .collect();
        let mut changed = Vec::with_capacity(touched.len());
        let mut fresh: HashMap<&Rep, usize> = HashMap::with_capacity(touched.len());
        for &i in &touched {
            match self.interp[i].substitute(label, value, &tower) {
                Ok(v) => changed.push((i, v)),
                Err(ArithError::SubstitutionSingularity(_)) => return Ok(None),
                Err(err) => return Err(err.into()),
            }
        }
        for (i, img) in &changed {
            if let Some(j) = self.index_of.get(img.rep()) {
                if touched.binary_search(j).is_err() {
                    return Ok(None);
                }
            }
            if fresh.insert(img.rep(), *i).is_some() {
                return Ok(None);
            }
        }
        Ok(Some((tower, changed)))
    }

    /// Performs the next pending operation of the closure dovetail.
    pub fn closure_step(&mut self) -> Result<(), PresentationError> {
        self.require_interp()?;
        while self.cursor.level < self.domain_size {
            let req = self.cursor.request();
            self.cursor.advance();
            match req {
                Request::Add(a, b) => {
                    let v = self.interp[a].add(&self.interp[b])?;
                    self.record(FactKind::Add, a, b, v);
                }
                Request::Mul(a, b) => {
                    let v = self.interp[a].mul(&self.interp[b])?;
                    self.record(FactKind::Mul, a, b, v);
                }
                Request::Neg(a) => {
                    let v = self.interp[a].neg();
                    let r = self.intern(v);
                    self.facts.push(Fact {
                        kind: FactKind::Add,
                        a,
                        b: r,
                        c: self.zero_index(),
                    });
                }
                Request::Inv(a) => {
                    if self.interp[a].is_zero() {
                        continue;
                    }
                    let v = self.interp[a].inv()?;
                    let r = self.intern(v);
                    self.facts.push(Fact {
                        kind: FactKind::Mul,
                        a,
                        b: r,
                        c: self.one_index(),
                    });
                }
            }
            return Ok(());
        }
        Ok(())
    }

    fn zero_index(&self) -> usize {
        self.index_of[&Rep::zero()]
    }

    fn one_index(&self) -> usize {
        self.index_of[&Rep::one()]
    }

    /// One stage: adjunctions, then rationalizations, then closure steps.
    pub fn advance_stage(&mut self, events: &[Event]) -> Result<(), PresentationError> {
        for ev in events {
            match ev {
                Event::AdjoinCurve {
                    curve,
                    label_x,
                    label_y,
                } => {
                    self.adjoin_curve_pair(*curve, label_x, label_y)?;
                }
                Event::AdjoinTranscendental { label } => {
                    self.adjoin_transcendental(label)?;
                }
                Event::Rationalize { .. } => {}
            }
        }
        for ev in events {
            if let Event::Rationalize { label } = ev {
                self.rationalize(label)?;
            }
        }
        for _ in 0..self.closure_steps {
            self.closure_step()?;
        }
        self.stage += 1;
        Ok(())
    }

    /// Element named by a ledger label.
    pub fn element(&self, label: &str) -> Result<&FieldElement, PresentationError> {
        self.interp(self.index_of_label(label)?)
    }
}
