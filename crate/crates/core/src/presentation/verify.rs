use std::collections::HashMap;
use std::fmt;

use super::{FactKind, LabelStatus, Presentation};
use crate::arith::FieldElement;
use crate::curves::evaluate_curve;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Fact number `position` mentions an index outside the domain.
    IndexOutOfRange { position: usize },
    /// Fact number `position` is false under the interpretation.
    FactFails { position: usize },
    /// Two indices denote the same element.
    NotInjective { first: usize, second: usize },
    /// The earlier diagram is not a prefix; `position` is the first fact
    /// that differs (or the earlier length if this one is shorter).
    PrefixMismatch { position: usize },
    /// `x^q + y^q != 1` for a ledgered curve pair.
    CurveRelation { x: String, y: String },
    /// A ledger entry points outside the domain.
    LedgerIndex { label: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::IndexOutOfRange { position } => {
                write!(f, "fact {position}: index out of range")
            }
            Violation::FactFails { position } => write!(f, "fact {position}: does not hold"),
            Violation::NotInjective { first, second } => {
                write!(f, "indices {first} and {second} denote the same element")
            }
            Violation::PrefixMismatch { position } => {
                write!(
                    f,
                    "earlier facts are not a prefix (first difference at fact {position})"
                )
            }
            Violation::CurveRelation { x, y } => write!(f, "pair ({x}, {y}) is not on its curve"),
            Violation::LedgerIndex { label } => {
                write!(f, "label {label} points outside the domain")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub violations: Vec<Violation>,
    pub facts_checked: usize,
    pub pairs_checked: usize,
    /// False when the presentation carried no interpretation, so only the
    /// structural checks ran.
    pub semantic: bool,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "violation: {v}")?;
        }
        write!(
            f,
            "{} facts, {} curve pairs checked{}: {}",
            self.facts_checked,
            self.pairs_checked,
            if self.semantic {
                ""
            } else {
                " (no interpretation)"
            },
            if self.ok() { "ok" } else { "FAILED" }
        )
    }
}

/// The `y` label paired with an `x` label: same name with `x` replaced.
fn partner(label: &str) -> Option<String> {
    label.strip_prefix('x').map(|rest| format!("y{rest}"))
}

/// Checks facts, injectivity, curve pairs and, given an earlier dump of the
/// same construction, the append-only prefix property.
pub fn verify(p: &Presentation, earlier: Option<&Presentation>) -> Report {
    let mut report = Report::default();
    let n = p.domain_size();
    let interp: Option<&[FieldElement]> = p.interpretation().ok();
    report.semantic = interp.is_some();

    for (pos, fact) in p.facts().iter().enumerate() {
        report.facts_checked += 1;
        if fact.a >= n || fact.b >= n || fact.c >= n {
            report
                .violations
                .push(Violation::IndexOutOfRange { position: pos });
            continue;
        }
        if let Some(v) = interp {
            let lhs = match fact.kind {
                FactKind::Add => v[fact.a].add(&v[fact.b]),
                FactKind::Mul => v[fact.a].mul(&v[fact.b]),
            };
            if lhs.as_ref() != Ok(&v[fact.c]) {
                report
                    .violations
                    .push(Violation::FactFails { position: pos });
            }
        }
    }

    for e in p.ledger() {
        if e.index >= n {
            report.violations.push(Violation::LedgerIndex {
                label: e.label.clone(),
            });
        }
    }

    if let Some(v) = interp {
        let mut seen: HashMap<&FieldElement, usize> = HashMap::with_capacity(v.len());
        for (i, e) in v.iter().enumerate() {
            if let Some(&j) = seen.get(e) {
                report.violations.push(Violation::NotInjective {
                    first: j,
                    second: i,
                });
            } else {
                seen.insert(e, i);
            }
        }
        for e in p.ledger() {
            let Some(y_label) = partner(&e.label) else {
                continue;
            };
            let Some(y) = p.entry(&y_label) else {
                continue;
            };
            let LabelStatus::Radical { q } = y.status else {
                continue;
            };
            if e.index >= n || y.index >= n {
                continue;
            }
            report.pairs_checked += 1;
            let on_curve = evaluate_curve(q, &v[e.index], &v[y.index]).map(|r| r.is_zero());
            if on_curve != Ok(true) {
                report.violations.push(Violation::CurveRelation {
                    x: e.label.clone(),
                    y: y_label,
                });
            }
        }
    }

    if let Some(old) = earlier {
        let old_facts = old.facts();
        let new_facts = p.facts();
        let common = old_facts
            .iter()
            .zip(new_facts)
            .take_while(|(a, b)| a == b)
            .count();
        if common < old_facts.len() {
            report
                .violations
                .push(Violation::PrefixMismatch { position: common });
        }
    }
    report
}
