//! Parfactor models: domains, predicates, atoms with inequality constraints,
//! and dense potential tables.

mod dpg;
mod ground;
mod normalize;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error as ModelError;

pub(crate) use dpg::dpg_tagged;
pub use dpg::{dpg, DpgResult};
pub use ground::{ground, GroundModel, GroundVar};
pub use normalize::{normalize, relevant_constants};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Domain {
    pub name: String,
    pub objects: Vec<String>,
}

impl Domain {
    pub fn new(name: impl Into<String>, objects: Vec<String>) -> Self {
        Self { name: name.into(), objects }
    }

    /// Domain `P = n` with objects `p1..pn`.
    pub fn numbered(name: impl Into<String>, n: usize) -> Self {
        let name = name.into();
        let prefix = name.to_lowercase();
        let objects = (1..=n).map(|i| format!("{prefix}{i}")).collect();
        Self { name, objects }
    }

    pub fn size(&self) -> usize {
        self.objects.len()
    }
}

/// A logvar, a domain object, or a representative object introduced by a DPG node.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Term {
    Var { name: String, domain: String },
    Obj { name: String, domain: String },
    Rep { name: String, domain: String },
}

impl Term {
    pub fn var(name: impl Into<String>, domain: impl Into<String>) -> Self {
        Term::Var { name: name.into(), domain: domain.into() }
    }

    pub fn obj(name: impl Into<String>, domain: impl Into<String>) -> Self {
        Term::Obj { name: name.into(), domain: domain.into() }
    }

    pub fn rep(name: impl Into<String>, domain: impl Into<String>) -> Self {
        Term::Rep { name: name.into(), domain: domain.into() }
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Var { name, .. } | Term::Obj { name, .. } | Term::Rep { name, .. } => name,
        }
    }

    pub fn domain(&self) -> &str {
        match self {
            Term::Var { domain, .. } | Term::Obj { domain, .. } | Term::Rep { domain, .. } => domain,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var { .. })
    }

    pub fn is_rep(&self) -> bool {
        matches!(self, Term::Rep { .. })
    }

    pub fn is_obj(&self) -> bool {
        matches!(self, Term::Obj { .. })
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: impl Into<String>, args: Vec<Term>) -> Self {
        Self { pred: pred.into(), args }
    }

    /// Distinct logvars in argument order.
    pub fn logvars(&self) -> Vec<&Term> {
        let mut out: Vec<&Term> = Vec::new();
        for t in &self.args {
            if t.is_var() && !out.contains(&t) {
                out.push(t);
            }
        }
        out
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| !t.is_var())
    }

    pub fn mentions(&self, term: &Term) -> bool {
        self.args.contains(term)
    }

    pub fn substitute(&self, theta: &Substitution) -> Atom {
        Atom { pred: self.pred.clone(), args: self.args.iter().map(|t| theta.apply(t)).collect() }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pred)?;
        if !self.args.is_empty() {
            let args: Vec<&str> = self.args.iter().map(Term::name).collect();
            write!(f, "({})", args.join(","))?;
        }
        Ok(())
    }
}

/// Conjunction of inequalities. Pairs are stored ordered so that `(a, b)`
/// and `(b, a)` coincide.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Constraint {
    pub neq: BTreeSet<(Term, Term)>,
}

impl Constraint {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, a: Term, b: Term) {
        if a <= b {
            self.neq.insert((a, b));
        } else {
            self.neq.insert((b, a));
        }
    }

    pub fn contains(&self, a: &Term, b: &Term) -> bool {
        let key = if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
        self.neq.contains(&key)
    }

    pub fn is_empty(&self) -> bool {
        self.neq.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Term, Term)> {
        self.neq.iter()
    }

    /// Apply a substitution; returns `None` if some pair collapses to `t != t`.
    /// Pairs between two distinct objects are dropped since they always hold.
    pub fn substitute(&self, theta: &Substitution) -> Option<Constraint> {
        let mut out = Constraint::new();
        for (a, b) in &self.neq {
            let (a, b) = (theta.apply(a), theta.apply(b));
            if a == b {
                return None;
            }
            if a.is_obj() && b.is_obj() {
                continue;
            }
            out.insert(a, b);
        }
        Some(out)
    }

    /// Whether a grounding (all terms mapped to object names) satisfies every pair.
    pub fn satisfied_by(&self, value: impl Fn(&Term) -> String) -> bool {
        self.neq.iter().all(|(a, b)| value(a) != value(b))
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.neq.iter().map(|(a, b)| format!("{a}!={b}")).collect();
        f.write_str(&parts.join(", "))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Substitution {
    pub map: BTreeMap<Term, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Term, Term)>) -> Self {
        Self { map: pairs.into_iter().collect() }
    }

    pub fn insert(&mut self, from: Term, to: Term) {
        self.map.insert(from, to);
    }

    pub fn apply(&self, t: &Term) -> Term {
        self.map.get(t).cloned().unwrap_or_else(|| t.clone())
    }

    pub fn get(&self, t: &Term) -> Option<&Term> {
        self.map.get(t)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredDecl {
    pub name: String,
    /// Domain name of each argument position.
    pub args: Vec<String>,
    /// Ordered value list.
    pub range: Vec<String>,
}

impl PredDecl {
    pub fn boolean(name: impl Into<String>, args: Vec<String>) -> Self {
        Self { name: name.into(), args, range: vec!["true".into(), "false".into()] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Parfactor {
    pub atoms: Vec<Atom>,
    pub constraint: Constraint,
    /// Row-major over the atoms' ranges, last atom fastest.
    pub table: Vec<f64>,
}

impl Parfactor {
    /// Distinct logvars in order of first appearance.
    pub fn logvars(&self) -> Vec<Term> {
        let mut out: Vec<Term> = Vec::new();
        for a in &self.atoms {
            for t in &a.args {
                if t.is_var() && !out.contains(t) {
                    out.push(t.clone());
                }
            }
        }
        out
    }

    pub fn is_ground(&self) -> bool {
        self.atoms.iter().all(Atom::is_ground)
    }

    pub fn substitute(&self, theta: &Substitution) -> Option<Parfactor> {
        Some(Parfactor {
            atoms: self.atoms.iter().map(|a| a.substitute(theta)).collect(),
            constraint: self.constraint.substitute(theta)?,
            table: self.table.clone(),
        })
    }
}

impl fmt::Display for Parfactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let atoms: Vec<String> = self.atoms.iter().map(ToString::to_string).collect();
        write!(f, "φ({})", atoms.join(", "))?;
        if !self.constraint.is_empty() {
            write!(f, " | {}", self.constraint)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub domains: Vec<Domain>,
    pub preds: Vec<PredDecl>,
    pub parfactors: Vec<Parfactor>,
}

impl Model {
    pub fn domain(&self, name: &str) -> Option<&Domain> {
        self.domains.iter().find(|d| d.name == name)
    }

    pub fn pred(&self, name: &str) -> Option<&PredDecl> {
        self.preds.iter().find(|p| p.name == name)
    }

    pub fn range_size(&self, pred: &str) -> usize {
        self.pred(pred).map_or(2, |p| p.range.len())
    }

    pub fn domain_size(&self, name: &str) -> usize {
        self.domain(name).map_or(0, Domain::size)
    }

    /// Copy of the model with every domain resized to `n` numbered objects.
    /// Constants in parfactors keep their names, so only use on constant-free models.
    pub fn with_domain_size(&self, n: usize) -> Model {
        let mut m = self.clone();
        m.domains = self.domains.iter().map(|d| Domain::numbered(d.name.clone(), n)).collect();
        m
    }

    /// Copy with every domain holding `n` objects: the constants mentioned in
    /// parfactors are kept and numbered objects fill the rest. `None` if some
    /// domain mentions more than `n` constants.
    pub fn resized(&self, n: usize) -> Option<Model> {
        let constants = relevant_constants(self);
        let mut m = self.clone();
        for d in &mut m.domains {
            let keep: Vec<String> = constants.get(&d.name).map(|c| c.iter().cloned().collect()).unwrap_or_default();
            if keep.len() > n {
                return None;
            }
            let mut objects = keep.clone();
            let mut i = 1;
            let prefix = d.name.to_lowercase();
            while objects.len() < n {
                let o = format!("{prefix}{i}");
                if !objects.contains(&o) {
                    objects.push(o);
                }
                i += 1;
            }
            d.objects = objects;
        }
        Some(m)
    }

    /// Copy with the named domain's objects replaced.
    pub fn with_domain_objects(&self, name: &str, objects: Vec<String>) -> Model {
        let mut m = self.clone();
        if let Some(d) = m.domains.iter_mut().find(|d| d.name == name) {
            d.objects = objects;
        }
        m
    }

    /// Structural checks: declared predicates and domains, arities, table sizes,
    /// finite nonnegative entries, co-domain inequalities.
    pub fn check(&self) -> Result<(), ModelError> {
        for (i, d) in self.domains.iter().enumerate() {
            if d.objects.is_empty() {
                return Err(ModelError::Semantic(format!("domain {} is empty", d.name)));
            }
            let unique: BTreeSet<&String> = d.objects.iter().collect();
            if unique.len() != d.objects.len() {
                return Err(ModelError::Semantic(format!("domain {} repeats an object", d.name)));
            }
            for other in &self.domains[..i] {
                if other.name == d.name {
                    return Err(ModelError::Semantic(format!("domain {} declared twice", d.name)));
                }
                if other.objects.iter().any(|o| d.objects.contains(o)) {
                    return Err(ModelError::OverlappingDomains(other.name.clone(), d.name.clone()));
                }
            }
        }
        for pf in &self.parfactors {
            let mut expected = 1usize;
            for atom in &pf.atoms {
                let decl = self
                    .pred(&atom.pred)
                    .ok_or_else(|| ModelError::Semantic(format!("unknown predicate {}", atom.pred)))?;
                if decl.args.len() != atom.args.len() {
                    return Err(ModelError::Semantic(format!(
                        "{} expects {} arguments, got {}",
                        atom.pred,
                        decl.args.len(),
                        atom.args.len()
                    )));
                }
                for (t, dom) in atom.args.iter().zip(&decl.args) {
                    if t.domain() != dom {
                        return Err(ModelError::Semantic(format!(
                            "argument {t} of {} is not in domain {dom}",
                            atom.pred
                        )));
                    }
                    if let Term::Obj { name, .. } = t {
                        let d =
                            self.domain(dom).ok_or_else(|| ModelError::Semantic(format!("unknown domain {dom}")))?;
                        if !d.objects.contains(name) {
                            return Err(ModelError::Semantic(format!("{name} is not an object of {dom}")));
                        }
                    }
                }
                expected *= decl.range.len();
            }
            if pf.table.len() != expected {
                return Err(ModelError::Semantic(format!(
                    "table of {pf} has {} entries, expected {expected}",
                    pf.table.len()
                )));
            }
            if pf.table.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(ModelError::Semantic(format!("table of {pf} has a negative or non-finite entry")));
            }
            for (a, b) in pf.constraint.iter() {
                if a.domain() != b.domain() {
                    return Err(ModelError::Semantic(format!("inequality {a}!={b} crosses domains")));
                }
            }
        }
        Ok(())
    }
}

/// Mixed-radix strides for a row-major table, last axis fastest.
pub(crate) fn strides(cards: &[usize]) -> Vec<usize> {
    let mut s = vec![1; cards.len()];
    for i in (0..cards.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * cards[i + 1];
    }
    s
}

/// Decode a flat index into per-axis values.
pub(crate) fn unravel(mut idx: usize, cards: &[usize], out: &mut [usize]) {
    for i in (0..cards.len()).rev() {
        out[i] = idx % cards[i];
        idx /= cards[i];
    }
}
