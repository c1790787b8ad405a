//! Stage-by-stage builders. Each stage `s + 1` (moving the presentation
//! from stage `s`) adjoins curve pair `s`, applies whatever rationalizations
//! the inputs demand, then runs the closure step.
//!
//! Label conventions, relied on by the reductions:
//! - `x{k}`, `y{k}`: the pair on curve `k`;
//! - `x{k}'`, `y{k}'`: the replacement pair after `x{k}` is swallowed;
//! - `x{2i},{t}`, `y{2i},{t}`: generation `t` of curve `2i` (`t = 0` for the
//!   first one, otherwise the stage that created it);
//! - `t{k}`: extra transcendentals of a fork.
//!
//! Stages past a schedule's horizon see a quiescent schedule.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::curves::Policy;
use crate::presentation::{Event, LabelStatus, Presentation, PresentationError};
use crate::schedules::{stable_use, true_stability, ChipSpec, EnumerationSchedule, PhiTable};

/// What a build intends: the transcendence basis, the labels made algebraic
/// and the swallowed labels with their replacements.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundTruth {
    pub basis: Vec<String>,
    pub algebraic: Vec<String>,
    pub replaced: BTreeMap<String, String>,
}

impl GroundTruth {
    /// Reads the truth off the ledger: surviving `x`/`t` labels form the
    /// basis, rationalized `x` labels and their `y` partners are algebraic.
    pub fn from_presentation(p: &Presentation, replaced: BTreeMap<String, String>) -> Self {
        let mut basis = Vec::new();
        let mut algebraic = Vec::new();
        for e in p.ledger() {
            match &e.status {
                LabelStatus::Transcendental
                    if e.label.starts_with('x') || e.label.starts_with('t') =>
                {
                    basis.push(e.label.clone())
                }
                LabelStatus::Rationalized(_) => {
                    algebraic.push(e.label.clone());
                    let y = format!("y{}", &e.label[1..]);
                    if p.entry(&y).is_some() {
                        algebraic.push(y);
                    }
                }
                _ => {}
            }
        }
        GroundTruth {
            basis,
            algebraic,
            replaced,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for l in &self.basis {
            writeln!(out, "basis {l}").unwrap();
        }
        for l in &self.algebraic {
            writeln!(out, "algebraic {l}").unwrap();
        }
        for (a, b) in &self.replaced {
            writeln!(out, "replaced {a} by {b}").unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, PresentationError> {
        let mut t = GroundTruth::default();
        for (k, line) in text.lines().enumerate() {
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks.as_slice() {
                [] => {}
                ["basis", l] => t.basis.push(l.to_string()),
                ["algebraic", l] => t.algebraic.push(l.to_string()),
                ["replaced", a, "by", b] => {
                    t.replaced.insert(a.to_string(), b.to_string());
                }
                _ => {
                    return Err(PresentationError::Parse {
                        line: k + 1,
                        msg: format!("bad sidecar line `{line}`"),
                    })
                }
            }
        }
        Ok(t)
    }
}

pub type Built = (Presentation, GroundTruth);

/// Label of generation `t` of curve `k`.
pub fn generation_label(prefix: char, k: u64, t: u64) -> String {
    format!("{prefix}{k},{t}")
}

fn curve_event(k: u64, label_x: String, label_y: String) -> Event {
    Event::AdjoinCurve {
        curve: k as usize,
        label_x,
        label_y,
    }
}

fn plain_pair(k: u64) -> Event {
    curve_event(k, format!("x{k}"), format!("y{k}"))
}

fn rationalize(label: String) -> Event {
    Event::Rationalize { label }
}

/// Runs `stages` stages; `plan(s, &presentation)` gives the events of stage
/// `s + 1`. `observe` sees the presentation after every stage.
fn run(
    policy: Policy,
    stages: u64,
    mut plan: impl FnMut(u64, &Presentation) -> Vec<Event>,
    observe: &mut dyn FnMut(&Presentation),
) -> Result<Presentation, PresentationError> {
    let mut p = Presentation::new(policy);
    for s in 0..stages {
        let events = plan(s, &p);
        p.advance_stage(&events)?;
        observe(&p);
    }
    Ok(p)
}

/// Curve `s` every stage; the least `i <= s` that has entered `C` and was
/// not yet served gets `x{i}` rationalized, one per stage.
pub fn build_singleton(
    c: &EnumerationSchedule,
    stages: u64,
    policy: Policy,
    observe: &mut dyn FnMut(&Presentation),
) -> Result<Built, PresentationError> {
    let mut served = BTreeSet::new();
    let p = run(
        policy,
        stages,
        |s, _| {
            let mut ev = vec![plain_pair(s)];
            if let Some(i) = (0..=s).find(|&i| c.member_at(i, s) && !served.contains(&i)) {
                served.insert(i);
                ev.push(rationalize(format!("x{i}")));
            }
            ev
        },
        observe,
    )?;
    let truth = GroundTruth::from_presentation(&p, BTreeMap::new());
    Ok((p, truth))
}

/// Curve `s` every stage; `x{2i}` is rationalized as soon as `i` is in `C`,
/// odd curves stay transcendental. With `d`, `x{2j+1}` is swallowed once
/// `j` is in `D` and a primed pair takes its place.
pub fn build_upcone_copy(
    c: &EnumerationSchedule,
    d: Option<&EnumerationSchedule>,
    stages: u64,
    policy: Policy,
    observe: &mut dyn FnMut(&Presentation),
) -> Result<Built, PresentationError> {
    let mut done = BTreeSet::new();
    let mut replaced = BTreeMap::new();
    let p = run(
        policy,
        stages,
        |s, _| {
            let mut ev = vec![plain_pair(s)];
            for k in 0..=s {
                if done.contains(&k) {
                    continue;
                }
                let hit = if k % 2 == 0 {
                    c.member_at(k / 2, s)
                } else {
                    d.is_some_and(|d| d.member_at(k / 2, s))
                };
                if !hit {
                    continue;
                }
                done.insert(k);
                ev.push(rationalize(format!("x{k}")));
                if k % 2 == 1 {
                    ev.push(curve_event(k, format!("x{k}'"), format!("y{k}'")));
                    replaced.insert(format!("x{k}"), format!("x{k}'"));
                }
            }
            ev
        },
        observe,
    )?;
    let truth = GroundTruth::from_presentation(&p, replaced);
    Ok((p, truth))
}

pub fn build_upcone(
    c: &EnumerationSchedule,
    stages: u64,
    policy: Policy,
    observe: &mut dyn FnMut(&Presentation),
) -> Result<Built, PresentationError> {
    build_upcone_copy(c, None, stages, policy, observe)
}

/// Curve `s` every stage, even curves as generation 0. Tracks the current
/// generation of every even curve.
struct Generations {
    current: BTreeMap<u64, u64>,
}

impl Generations {
    fn new() -> Self {
        Generations {
            current: BTreeMap::new(),
        }
    }

    fn adjoin(&mut self, s: u64) -> Event {
        if s % 2 == 0 {
            self.current.insert(s / 2, 0);
            curve_event(s, generation_label('x', s, 0), generation_label('y', s, 0))
        } else {
            plain_pair(s)
        }
    }

    /// Rationalizes the live generation of `x{2i}`; with `respawn_at`,
    /// adjoins generation `respawn_at` in its place.
    fn retire(&mut self, i: u64, respawn_at: Option<u64>, ev: &mut Vec<Event>) {
        let Some(t) = self.current.get(&i).copied() else {
            return;
        };
        let k = 2 * i;
        ev.push(rationalize(generation_label('x', k, t)));
        match respawn_at {
            Some(t) => {
                ev.push(curve_event(
                    k,
                    generation_label('x', k, t),
                    generation_label('y', k, t),
                ));
                self.current.insert(i, t);
            }
            None => {
                self.current.remove(&i);
            }
        }
    }
}

/// Chip-driven generations: when `h(s) = i`, generation `x{2i},t` is made
/// rational and generation `s + 1` adjoined. At the last stage every even
/// curve whose `i` is hit infinitely often (by the tail) is retired for good,
/// so the final field is the limit field.
pub fn build_edegree(
    chip: &ChipSpec,
    stages: u64,
    policy: Policy,
    observe: &mut dyn FnMut(&Presentation),
) -> Result<Built, PresentationError> {
    let mut gens = Generations::new();
    let p = run(
        policy,
        stages,
        |s, _| {
            let mut ev = vec![gens.adjoin(s)];
            gens.retire(chip.h(s), Some(s + 1), &mut ev);
            if s + 1 == stages {
                let doomed: Vec<u64> = gens
                    .current
                    .keys()
                    .copied()
                    .filter(|&i| !chip.in_s(i))
                    .collect();
                for i in doomed {
                    gens.retire(i, None, &mut ev);
                }
            }
            ev
        },
        observe,
    )?;
    let truth = GroundTruth::from_presentation(&p, BTreeMap::new());
    Ok((p, truth))
}

/// Stage after which the generation of curve `2i` never changes again, if
/// the computation on `i` truly stabilizes within `stages`.
pub fn settling_stage(phi: &PhiTable, d: &EnumerationSchedule, i: u64, stages: u64) -> Option<u64> {
    let (s, _) = true_stability(phi, d, i)?;
    let t = (s + 1).max(2 * i + 1);
    (t <= stages).then_some(t)
}

/// Even generations are replaced every stage unless the computation on `i`
/// holds with a use `D` respects; odd curves follow the swallow-and-replace
/// rule driven by `D`. At the last stage generations that never settle are
/// retired for good.
pub fn build_edegree_copy(
    phi: &PhiTable,
    d: &EnumerationSchedule,
    stages: u64,
    policy: Policy,
    observe: &mut dyn FnMut(&Presentation),
) -> Result<Built, PresentationError> {
    let mut gens = Generations::new();
    let mut swallowed = BTreeSet::new();
    let mut replaced = BTreeMap::new();
    let p = run(
        policy,
        stages,
        |s, _| {
            let mut ev = vec![gens.adjoin(s)];
            let live: Vec<u64> = gens.current.keys().copied().collect();
            for i in live {
                if stable_use(phi, d, i, s).is_none() {
                    gens.retire(i, Some(s + 1), &mut ev);
                }
            }
            for k in (1..=s).step_by(2) {
                let j = k / 2;
                if !swallowed.contains(&k) && d.member_at(j, s) {
                    swallowed.insert(k);
                    ev.push(rationalize(format!("x{k}")));
                    ev.push(curve_event(k, format!("x{k}'"), format!("y{k}'")));
                    replaced.insert(format!("x{k}"), format!("x{k}'"));
                }
            }
            if s + 1 == stages {
                let doomed: Vec<u64> = gens
                    .current
                    .keys()
                    .copied()
                    .filter(|&i| settling_stage(phi, d, i, stages).is_none())
                    .collect();
                for i in doomed {
                    gens.retire(i, None, &mut ev);
                }
            }
            ev
        },
        observe,
    )?;
    let truth = GroundTruth::from_presentation(&p, replaced);
    Ok((p, truth))
}

/// Two presentations with a common diagram prefix.
#[derive(Debug, Clone)]
pub struct Fork {
    /// `(x1, y1)` stays a transcendental point of the curve.
    pub f: Presentation,
    /// `x1` is made rational right after the prefix, so `y1` is algebraic.
    pub e: Presentation,
    /// Number of facts in the shared prefix.
    pub prefix_facts: usize,
}

/// Stage 1 adjoins `(x1, y1)` on `curve`; the remaining prefix stages only
/// close. After the prefix both sides adjoin `t2, t3, ...`, one per stage,
/// and `E` rationalizes `x1` at its first stage.
pub fn build_fork(
    curve: usize,
    prefix_stages: u64,
    total_stages: u64,
    policy: Policy,
) -> Result<Fork, PresentationError> {
    if prefix_stages == 0 || prefix_stages >= total_stages {
        return Err(PresentationError::InvalidRecipe(
            "need 0 < prefix stages < total stages".into(),
        ));
    }
    let mut p = Presentation::new(policy);
    p.advance_stage(&[Event::AdjoinCurve {
        curve,
        label_x: "x1".into(),
        label_y: "y1".into(),
    }])?;
    for _ in 1..prefix_stages {
        p.advance_stage(&[])?;
    }
    let prefix_facts = p.facts().len();
    let mut f = p.clone();
    let mut e = p;
    for (k, s) in (prefix_stages..total_stages).enumerate() {
        let t = Event::AdjoinTranscendental {
            label: format!("t{}", k + 2),
        };
        f.advance_stage(std::slice::from_ref(&t))?;
        let mut ev = vec![t];
        if s == prefix_stages {
            ev.push(rationalize("x1".into()));
        }
        e.advance_stage(&ev)?;
    }
    Ok(Fork { f, e, prefix_facts })
}

#[cfg(test)]
mod tests;
