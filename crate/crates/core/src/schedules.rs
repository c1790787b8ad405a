//! Finite-horizon stand-ins for enumerations, chip functions and
//! use-annotated oracle computations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("inconsistent spec: {0}")]
    InconsistentSpec(String),
}

fn parse_err(line: usize, msg: impl Into<String>) -> ScheduleError {
    ScheduleError::Parse {
        line,
        msg: msg.into(),
    }
}

fn num(tok: Option<&str>, line: usize) -> Result<u64, ScheduleError> {
    let tok = tok.ok_or_else(|| parse_err(line, "missing number"))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("bad number `{tok}`")))
}

fn expect(tok: Option<&str>, word: &str, line: usize) -> Result<(), ScheduleError> {
    match tok {
        Some(t) if t == word => Ok(()),
        _ => Err(parse_err(line, format!("expected `{word}`"))),
    }
}

/// Meaningful lines with their 1-based numbers; `#` starts a comment.
fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(k, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then(|| (k + 1, l.split_whitespace().collect()))
    })
}

/// Element `n` enters at stage `s`; nothing happens after `horizon`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EnumerationSchedule {
    entries: BTreeMap<u64, u64>,
    horizon: u64,
}

impl EnumerationSchedule {
    pub fn new(
        entries: impl IntoIterator<Item = (u64, u64)>,
        horizon: u64,
    ) -> Result<Self, ScheduleError> {
        let mut map = BTreeMap::new();
        for (n, s) in entries {
            if s > horizon {
                return Err(ScheduleError::InconsistentSpec(format!(
                    "{n} enters at {s}, after horizon {horizon}"
                )));
            }
            if map.insert(n, s).is_some() {
                return Err(ScheduleError::InconsistentSpec(format!("{n} enters twice")));
            }
        }
        Ok(EnumerationSchedule {
            entries: map,
            horizon,
        })
    }

    pub fn empty(horizon: u64) -> Self {
        EnumerationSchedule {
            entries: BTreeMap::new(),
            horizon,
        }
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn entry_stage(&self, n: u64) -> Option<u64> {
        self.entries.get(&n).copied()
    }

    pub fn member_at(&self, n: u64, s: u64) -> bool {
        self.entry_stage(n).is_some_and(|t| t <= s)
    }

    /// The set enumerated by the horizon.
    pub fn members(&self) -> BTreeSet<u64> {
        self.entries.keys().copied().collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.entries.iter().map(|(&n, &s)| (n, s))
    }

    /// Whether some `n < u` enters at a stage in `(from, to]`.
    pub fn changes_below(&self, u: u64, from: u64, to: u64) -> bool {
        self.entries.range(..u).any(|(_, &s)| s > from && s <= to)
    }

    pub fn parse(text: &str) -> Result<Self, ScheduleError> {
        let mut entries = Vec::new();
        let mut horizon = None;
        for (line, toks) in lines(text) {
            let mut it = toks.into_iter();
            match it.next() {
                Some("enter") => {
                    let n = num(it.next(), line)?;
                    expect(it.next(), "at", line)?;
                    entries.push((n, num(it.next(), line)?));
                }
                Some("horizon") => horizon = Some(num(it.next(), line)?),
                Some(other) => return Err(parse_err(line, format!("unknown directive `{other}`"))),
                None => unreachable!(),
            }
            if it.next().is_some() {
                return Err(parse_err(line, "trailing tokens"));
            }
        }
        let horizon = horizon.unwrap_or_else(|| entries.iter().map(|e| e.1).max().unwrap_or(0));
        EnumerationSchedule::new(entries, horizon)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (n, s) in self.entries() {
            writeln!(out, "enter {n} at {s}").unwrap();
        }
        writeln!(out, "horizon {}", self.horizon).unwrap();
        out
    }
}

/// A total function `h` given by a table up to the horizon and a repeating
/// tail afterwards. The encoded set is everything outside the tail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChipSpec {
    chips: Vec<u64>,
    tail: Vec<u64>,
}

impl ChipSpec {
    /// `chips[s] = h(s)` for `s <= horizon = chips.len() - 1`.
    pub fn new(chips: Vec<u64>, tail: Vec<u64>) -> Result<Self, ScheduleError> {
        if chips.is_empty() {
            return Err(ScheduleError::InconsistentSpec("no chips".into()));
        }
        if tail.is_empty() {
            return Err(ScheduleError::InconsistentSpec("empty tail cycle".into()));
        }
        Ok(ChipSpec { chips, tail })
    }

    pub fn horizon(&self) -> u64 {
        self.chips.len() as u64 - 1
    }

    pub fn h(&self, s: u64) -> u64 {
        match self.chips.get(s as usize) {
            Some(&v) => v,
            None => {
                let k = (s - self.chips.len() as u64) % self.tail.len() as u64;
                self.tail[k as usize]
            }
        }
    }

    pub fn tail(&self) -> &[u64] {
        &self.tail
    }

    /// `h^{-1}(n)` is finite.
    pub fn in_s(&self, n: u64) -> bool {
        !self.tail.contains(&n)
    }

    pub fn hits(&self, n: u64, up_to: u64) -> Vec<u64> {
        (0..=up_to).filter(|&s| self.h(s) == n).collect()
    }

    pub fn parse(text: &str) -> Result<Self, ScheduleError> {
        let mut table = BTreeMap::new();
        let mut tail = Vec::new();
        let mut horizon = None;
        for (line, toks) in lines(text) {
            let mut it = toks.into_iter();
            match it.next() {
                Some("chip") => {
                    let s = num(it.next(), line)?;
                    let v = num(it.next(), line)?;
                    if table.insert(s, v).is_some() {
                        return Err(parse_err(line, format!("second chip for stage {s}")));
                    }
                }
                Some("tail") => {
                    expect(it.next(), "cycle", line)?;
                    for t in it.by_ref() {
                        tail.push(num(Some(t), line)?);
                    }
                }
                Some("horizon") => horizon = Some(num(it.next(), line)?),
                Some(other) => return Err(parse_err(line, format!("unknown directive `{other}`"))),
                None => unreachable!(),
            }
            if it.next().is_some() {
                return Err(parse_err(line, "trailing tokens"));
            }
        }
        let horizon = horizon
            .or_else(|| table.keys().next_back().copied())
            .ok_or_else(|| ScheduleError::InconsistentSpec("no chips".into()))?;
        let chips = (0..=horizon)
            .map(|s| {
                table
                    .get(&s)
                    .copied()
                    .ok_or_else(|| ScheduleError::InconsistentSpec(format!("h({s}) undefined")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if table.len() != chips.len() {
            return Err(ScheduleError::InconsistentSpec(
                "chip beyond horizon".into(),
            ));
        }
        ChipSpec::new(chips, tail)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (s, v) in self.chips.iter().enumerate() {
            writeln!(out, "chip {s} {v}").unwrap();
        }
        let tail: Vec<String> = self.tail.iter().map(u64::to_string).collect();
        writeln!(out, "tail cycle {}", tail.join(" ")).unwrap();
        writeln!(out, "horizon {}", self.horizon()).unwrap();
        out
    }
}

/// Rows `(i, s, u)`: the computation on input `i` converged at stage `s`
/// with use `u`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PhiTable {
    rows: BTreeMap<(u64, u64), u64>,
}

impl PhiTable {
    pub fn new(rows: impl IntoIterator<Item = (u64, u64, u64)>) -> Result<Self, ScheduleError> {
        let mut map = BTreeMap::new();
        for (i, s, u) in rows {
            if map.insert((i, s), u).is_some() {
                return Err(ScheduleError::InconsistentSpec(format!(
                    "two rows for input {i} at stage {s}"
                )));
            }
        }
        Ok(PhiTable { rows: map })
    }

    pub fn rows(&self) -> impl Iterator<Item = (u64, u64, u64)> + '_ {
        self.rows.iter().map(|(&(i, s), &u)| (i, s, u))
    }

    fn rows_for(&self, i: u64) -> impl DoubleEndedIterator<Item = (u64, u64)> + '_ {
        self.rows
            .range((i, 0)..=(i, u64::MAX))
            .map(|(&(_, s), &u)| (s, u))
    }

    pub fn parse(text: &str) -> Result<Self, ScheduleError> {
        let mut rows = Vec::new();
        for (line, toks) in lines(text) {
            let mut it = toks.into_iter();
            expect(it.next(), "phi", line)?;
            let i = num(it.next(), line)?;
            expect(it.next(), "at", line)?;
            let s = num(it.next(), line)?;
            expect(it.next(), "use", line)?;
            let u = num(it.next(), line)?;
            if it.next().is_some() {
                return Err(parse_err(line, "trailing tokens"));
            }
            rows.push((i, s, u));
        }
        PhiTable::new(rows)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, s, u) in self.rows() {
            writeln!(out, "phi {i} at {s} use {u}").unwrap();
        }
        out
    }
}

/// The use of the most recent computation on `i` (converged at some stage
/// `<= s`) whose use region of `D` has not changed through stage `s + 1`.
///
/// A computation keeps counting once converged: it stays valid until `D`
/// changes below its use.
pub fn stable_use(phi: &PhiTable, d: &EnumerationSchedule, i: u64, s: u64) -> Option<u64> {
    phi.rows_for(i)
        .rev()
        .filter(|&(s0, _)| s0 <= s)
        .find(|&(s0, u)| !d.changes_below(u, s0, s + 1))
        .map(|(_, u)| u)
}

/// The least convergence stage whose use region of `D` never changes again
/// (through the horizon).
pub fn true_stability(phi: &PhiTable, d: &EnumerationSchedule, i: u64) -> Option<(u64, u64)> {
    phi.rows_for(i)
        .find(|&(s0, u)| !d.changes_below(u, s0, d.horizon()))
}

/// Chip function for `{2n : n in C} ∪ {2n+1 : n in witness}`.
///
/// The probed range is `[0, 2 max + 2)` where `max` bounds both inputs;
/// every probed number outside the target set is hit infinitely often and
/// nothing inside it is ever hit.
pub fn join_spec(
    c: &EnumerationSchedule,
    complement_witness: &BTreeSet<u64>,
) -> Result<ChipSpec, ScheduleError> {
    let members = c.members();
    if let Some(n) = members.intersection(complement_witness).next() {
        return Err(ScheduleError::InconsistentSpec(format!(
            "{n} is both in C and in the complement witness"
        )));
    }
    let limit = join_probe_limit(c, complement_witness);
    let target: BTreeSet<u64> = members
        .iter()
        .map(|n| 2 * n)
        .chain(complement_witness.iter().map(|n| 2 * n + 1))
        .collect();
    let mut cycle: Vec<u64> = (0..limit).filter(|n| !target.contains(n)).collect();
    if cycle.is_empty() {
        cycle.push(limit);
    }
    let chips = (0..=c.horizon())
        .map(|s| cycle[(s as usize) % cycle.len()])
        .collect();
    ChipSpec::new(chips, cycle)
}

/// Upper end of the range `join_spec` probes.
pub fn join_probe_limit(c: &EnumerationSchedule, complement_witness: &BTreeSet<u64>) -> u64 {
    let max = c
        .members()
        .iter()
        .chain(complement_witness)
        .max()
        .copied()
        .unwrap_or(0);
    2 * max + 2
}
