use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use super::{
    Cursor, Fact, FactKind, LabelStatus, LedgerEntry, Presentation, PresentationError,
    DEFAULT_CLOSURE_STEPS,
};
use crate::arith::expr::parse_element;
use crate::arith::{FieldElement, Generator, GeneratorKind, Rational, Tower};

const MAGIC: &str = "presentation v1";

fn err(line: usize, msg: impl Into<String>) -> PresentationError {
    PresentationError::Parse {
        line,
        msg: msg.into(),
    }
}

fn fmt_q(a: &Rational) -> String {
    if a.is_integer() {
        a.numer().to_string()
    } else {
        format!("{}/{}", a.numer(), a.denom())
    }
}

impl Presentation {
    /// Line-based text form. The facts section only ever grows, so the
    /// facts of an earlier stage are a prefix of those of a later one.
    /// `with_interp` adds `#` lines from which `load` rebuilds the tower and
    /// the interpretation.
    pub fn dump(&self, with_interp: bool) -> String {
        let mut out = String::new();
        writeln!(out, "{MAGIC}").unwrap();
        writeln!(out, "policy {}", self.policy).unwrap();
        writeln!(out, "stage {}", self.stage).unwrap();
        writeln!(out, "domain {}", self.domain_size).unwrap();
        out.push_str(&self.facts_text());
        for e in &self.ledger {
            writeln!(out, "label {} {} {}", e.label, e.index, e.status).unwrap();
        }
        if with_interp && self.has_interpretation() {
            for g in self.tower.generators() {
                match &g.kind {
                    GeneratorKind::Transcendental => {
                        writeln!(out, "# gen {} transcendental", g.label).unwrap()
                    }
                    GeneratorKind::Radical { q, radicand } => writeln!(
                        out,
                        "# gen {} radical {} {}",
                        g.label,
                        q,
                        radicand.display_with(&self.tower)
                    )
                    .unwrap(),
                    GeneratorKind::Specialized(v) => {
                        writeln!(out, "# gen {} specialized {}", g.label, fmt_q(v)).unwrap()
                    }
                }
            }
            writeln!(out, "# cursor {} {}", self.cursor.level, self.cursor.step).unwrap();
            writeln!(out, "# closure {}", self.closure_steps).unwrap();
            for (i, e) in self.interp.iter().enumerate() {
                writeln!(out, "# interp {i} {e}").unwrap();
            }
        }
        out
    }

    /// Just the fact lines, in recording order.
    pub fn facts_text(&self) -> String {
        let mut out = String::new();
        for f in &self.facts {
            writeln!(out, "{f}").unwrap();
        }
        out
    }

    pub fn load(text: &str) -> Result<Presentation, PresentationError> {
        let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));
        let mut header = |key: &str| -> Result<(usize, String), PresentationError> {
            let (n, l) = lines.next().ok_or_else(|| err(0, "truncated header"))?;
            if key == MAGIC {
                return if l == MAGIC {
                    Ok((n, String::new()))
                } else {
                    Err(err(n, "expected `presentation v1`"))
                };
            }
            let rest = l
                .strip_prefix(key)
                .and_then(|r| r.strip_prefix(' '))
                .ok_or_else(|| err(n, format!("expected `{key}`")))?;
            Ok((n, rest.to_string()))
        };
        header(MAGIC)?;
        let (n, policy) = header("policy")?;
        let policy = policy.parse().map_err(|e: String| err(n, e))?;
        let (n, stage) = header("stage")?;
        let stage = stage.parse().map_err(|_| err(n, "bad stage"))?;
        let (n, domain) = header("domain")?;
        let domain_size: usize = domain.parse().map_err(|_| err(n, "bad domain size"))?;

        let mut facts = Vec::new();
        let mut ledger = Vec::new();
        let mut tower = Tower::new();
        let mut cursor = Cursor::default();
        let mut closure_steps = DEFAULT_CLOSURE_STEPS;
        let mut interp_lines: Vec<(usize, usize, String)> = Vec::new();
        let mut section = 0;
        for (n, line) in lines {
            let toks: Vec<&str> = line.split(' ').collect();
            match toks[0] {
                "add" | "mul" => {
                    if section > 0 {
                        return Err(err(n, "fact after ledger"));
                    }
                    if toks.len() != 4 {
                        return Err(err(n, "fact needs three indices"));
                    }
                    let idx = |t: &str| {
                        t.parse::<usize>()
                            .map_err(|_| err(n, format!("bad index `{t}`")))
                    };
                    facts.push(Fact {
                        kind: if toks[0] == "add" {
                            FactKind::Add
                        } else {
                            FactKind::Mul
                        },
                        a: idx(toks[1])?,
                        b: idx(toks[2])?,
                        c: idx(toks[3])?,
                    });
                }
                "label" => {
                    if section > 1 {
                        return Err(err(n, "label after debug section"));
                    }
                    section = 1;
                    ledger.push(parse_label(n, &toks)?);
                }
                "#" => {
                    section = 2;
                    match toks.get(1).copied() {
                        Some("gen") => {
                            tower = add_generator(n, tower, &toks[2..])?;
                        }
                        Some("cursor") if toks.len() == 4 => {
                            let num = |t: &str| t.parse().map_err(|_| err(n, "bad cursor"));
                            cursor = Cursor {
                                level: num(toks[2])?,
                                step: num(toks[3])?,
                            };
                        }
                        Some("closure") if toks.len() == 3 => {
                            closure_steps =
                                toks[2].parse().map_err(|_| err(n, "bad closure count"))?;
                        }
                        Some("interp") if toks.len() >= 4 => {
                            let i = toks[2].parse().map_err(|_| err(n, "bad index"))?;
                            interp_lines.push((n, i, toks[3..].join(" ")));
                        }
                        _ => return Err(err(n, "unknown debug line")),
                    }
                }
                _ => return Err(err(n, format!("unexpected line `{line}`"))),
            }
        }

        let tower = Arc::new(tower);
        let mut interp = Vec::new();
        if !interp_lines.is_empty() {
            if interp_lines.len() != domain_size {
                return Err(err(0, "interpretation does not cover the domain"));
            }
            for (k, (n, i, expr)) in interp_lines.into_iter().enumerate() {
                if i != k {
                    return Err(err(n, "interpretation lines out of order"));
                }
                let e = parse_element(&tower, &expr).map_err(|e| err(n, e.to_string()))?;
                interp.push(e);
            }
        }
        let index_of = interp
            .iter()
            .enumerate()
            .map(|(i, e): (usize, &FieldElement)| (e.rep().clone(), i))
            .collect::<HashMap<_, _>>();
        Ok(Presentation {
            policy,
            stage,
            domain_size,
            facts,
            interp,
            index_of,
            tower,
            ledger,
            cursor,
            closure_steps,
        })
    }
}

fn parse_label(n: usize, toks: &[&str]) -> Result<LedgerEntry, PresentationError> {
    if toks.len() < 4 {
        return Err(err(n, "label line needs name, index and status"));
    }
    let index = toks[2].parse().map_err(|_| err(n, "bad label index"))?;
    let status = match &toks[3..] {
        ["constant"] => LabelStatus::Constant,
        ["transcendental"] => LabelStatus::Transcendental,
        ["radical", q] => {
            let q = q
                .strip_prefix("q=")
                .and_then(|q| q.parse().ok())
                .ok_or_else(|| err(n, "bad radical exponent"))?;
            LabelStatus::Radical { q }
        }
        ["rationalized", a] => {
            let a = a
                .strip_prefix("a=")
                .and_then(|a| a.parse::<Rational>().ok())
                .ok_or_else(|| err(n, "bad rational value"))?;
            LabelStatus::Rationalized(a)
        }
        _ => return Err(err(n, "unknown label status")),
    };
    Ok(LedgerEntry {
        label: toks[1].to_string(),
        index,
        status,
    })
}

fn add_generator(n: usize, tower: Tower, toks: &[&str]) -> Result<Tower, PresentationError> {
    let wrap = |e: crate::arith::ArithError| err(n, e.to_string());
    match toks {
        [label, "transcendental"] => tower.adjoin_transcendental(label).map_err(wrap),
        [label, "specialized", v] => {
            let v = v
                .parse::<Rational>()
                .map_err(|_| err(n, "bad rational value"))?;
            tower
                .adjoin(Generator {
                    label: label.to_string(),
                    kind: GeneratorKind::Specialized(v),
                })
                .map_err(wrap)
        }
        [label, "radical", q, expr @ ..] if !expr.is_empty() => {
            let q = q.parse().map_err(|_| err(n, "bad radical exponent"))?;
            let base = Arc::new(tower);
            let radicand = parse_element(&base, &expr.join(" "))
                .map_err(wrap)?
                .rep()
                .clone();
            let tower = Arc::try_unwrap(base).unwrap_or_else(|arc| (*arc).clone());
            tower
                .adjoin(Generator::radical(*label, q, radicand))
                .map_err(wrap)
        }
        _ => Err(err(n, "malformed generator line")),
    }
}
