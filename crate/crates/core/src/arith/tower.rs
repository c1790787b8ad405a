use std::sync::atomic::{AtomicU64, Ordering};

use super::element::Rep;
use super::poly::Var;
use super::power::{radicals_independent, rep_in_qth_power_group};
use super::{ArithError, Rational};

static NEXT_LINEAGE: AtomicU64 = AtomicU64::new(1);

fn fresh_lineage() -> u64 {
    NEXT_LINEAGE.fetch_add(1, Ordering::Relaxed)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    Transcendental,
    /// `g^q = radicand`, radicand over strictly earlier generators.
    Radical {
        q: u32,
        radicand: Rep,
    },
    /// A former transcendental replaced by a rational value. No element of
    /// the tower mentions it any more.
    Specialized(Rational),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub label: String,
    pub kind: GeneratorKind,
}

impl Generator {
    pub fn transcendental(label: impl Into<String>) -> Self {
        Generator {
            label: label.into(),
            kind: GeneratorKind::Transcendental,
        }
    }

    pub fn radical(label: impl Into<String>, q: u32, radicand: Rep) -> Self {
        Generator {
            label: label.into(),
            kind: GeneratorKind::Radical { q, radicand },
        }
    }
}

/// Ordered registry of generators. Generator ids are positions and never
/// change; adjoining keeps the lineage so older elements stay valid, while
/// specialization starts a new lineage (it is a different field).
#[derive(Clone, Debug)]
pub struct Tower {
    lineage: u64,
    gens: Vec<Generator>,
}

impl Default for Tower {
    fn default() -> Self {
        Tower::new()
    }
}

pub(crate) fn is_odd_prime_ge5(q: u32) -> bool {
    if q < 5 || q % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= q {
        if q % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl Tower {
    pub fn new() -> Self {
        Tower {
            lineage: fresh_lineage(),
            gens: Vec::new(),
        }
    }

    pub fn lineage(&self) -> u64 {
        self.lineage
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn generator(&self, id: Var) -> &Generator {
        &self.gens[id as usize]
    }

    pub fn find(&self, label: &str) -> Option<Var> {
        self.gens
            .iter()
            .position(|g| g.label == label)
            .map(|i| i as Var)
    }

    pub fn label(&self, id: Var) -> &str {
        &self.gens[id as usize].label
    }

    pub(crate) fn radical(&self, id: Var) -> (u32, &Rep) {
        match &self.gens[id as usize].kind {
            GeneratorKind::Radical { q, radicand } => (*q, radicand),
            _ => panic!("generator {id} is not radical"),
        }
    }

    pub(crate) fn radical_q(&self, id: Var) -> u32 {
        self.radical(id).0
    }

    /// A radical is algebraic-type when its radicand is algebraic over Q,
    /// i.e. mentions no transcendental and only algebraic-type radicals.
    pub fn is_algebraic_type(&self, id: Var) -> bool {
        match &self.gens[id as usize].kind {
            GeneratorKind::Transcendental => false,
            GeneratorKind::Specialized(_) => true,
            GeneratorKind::Radical { radicand, .. } => self.rep_is_algebraic(radicand),
        }
    }

    /// True when `rep` lies in the algebraic closure of Q inside the tower.
    pub(crate) fn rep_is_algebraic(&self, rep: &Rep) -> bool {
        rep.terms().all(|(m, c)| {
            c.vars().iter().all(|&v| self.is_algebraic_type(v))
                && m.vars().all(|g| self.is_algebraic_type(g))
        })
    }

    pub fn is_prefix_of(&self, other: &Tower) -> bool {
        self.lineage == other.lineage && self.gens.len() <= other.gens.len()
    }

    /// Returns the extended tower. Radical generators are checked for
    /// irreducibility of `Y^q - radicand` via [`super::qth_power_test`].
    ///
    /// The test is exact for radicands in the base field; radicands that
    /// involve other radicals are rejected as unsupported rather than
    /// guessed at.
    pub fn adjoin(&self, g: Generator) -> Result<Tower, ArithError> {
        if self.find(&g.label).is_some() {
            return Err(ArithError::DuplicateLabel(g.label));
        }
        if let GeneratorKind::Radical { q, radicand } = &g.kind {
            if !is_odd_prime_ge5(*q) {
                return Err(ArithError::InvalidExponent(*q));
            }
            if radicand.is_zero() {
                return Err(ArithError::DegenerateRadicand);
            }
            if radicand
                .max_var()
                .is_some_and(|v| v as usize >= self.gens.len())
            {
                return Err(ArithError::UnknownLabel(g.label));
            }
            if rep_in_qth_power_group(self, radicand, *q)? {
                return Err(ArithError::ReducibleRelation(g.label));
            }
        }
        let mut gens = self.gens.clone();
        gens.push(g);
        Ok(Tower {
            lineage: self.lineage,
            gens,
        })
    }

    pub fn adjoin_transcendental(&self, label: &str) -> Result<Tower, ArithError> {
        self.adjoin(Generator::transcendental(label))
    }

    /// The tower obtained by sending transcendental `label` to `value`.
    pub fn specialize(&self, label: &str, value: &Rational) -> Result<Tower, ArithError> {
        let id = self
            .find(label)
            .ok_or_else(|| ArithError::UnknownLabel(label.to_string()))?;
        if self.gens[id as usize].kind != GeneratorKind::Transcendental {
            return Err(ArithError::NotTranscendental(label.to_string()));
        }
        let mut gens = self.gens.clone();
        gens[id as usize].kind = GeneratorKind::Specialized(value.clone());
        let mut touched_q = Vec::new();
        for g in gens.iter_mut() {
            if let GeneratorKind::Radical { q, radicand } = &mut g.kind {
                if radicand.contains_base_var(id) {
                    let new = radicand
                        .eval_var(id, value)
                        .ok_or_else(|| ArithError::SubstitutionSingularity(label.to_string()))?;
                    if new.is_zero() {
                        return Err(ArithError::DegenerateRadicand);
                    }
                    *radicand = new;
                    touched_q.push((*q, g.label.clone()));
                }
            }
        }
        let out = Tower {
            lineage: fresh_lineage(),
            gens,
        };
        for (q, name) in touched_q {
            if !radicals_independent(&out, q)? {
                return Err(ArithError::ReducibleRelation(name));
            }
        }
        Ok(out)
    }

    pub fn specialized_value(&self, id: Var) -> Option<&Rational> {
        match &self.gens[id as usize].kind {
            GeneratorKind::Specialized(v) => Some(v),
            _ => None,
        }
    }
}

impl Rep {
    fn max_var(&self) -> Option<Var> {
        self.terms()
            .flat_map(|(m, c)| m.vars().chain(c.vars()))
            .max()
    }
}
