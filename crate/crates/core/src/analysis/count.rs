use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::fotree::{CAtom, SymSet};
use crate::model::{Atom, Model, Substitution, Term};

/// Placeholder logvar inside counting patterns.
pub(crate) const HOLE: &str = "_";

/// `#_X[P1(X), ..., Pm(X)]`: the histogram of joint states of the patterns
/// over the `size` objects of `domain` that avoid `excluded`.
///
/// Identity ignores the display name.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CountVar {
    pub name: String,
    pub domain: String,
    pub excluded: BTreeSet<Term>,
    /// Sorted, each with the counted logvar replaced by `_`.
    pub patterns: Vec<Atom>,
    pub size: usize,
}

impl CountVar {
    fn key(&self) -> (&str, &BTreeSet<Term>, &[Atom]) {
        (&self.domain, &self.excluded, &self.patterns)
    }

    /// Range size of each pattern, in pattern order.
    pub fn ranges(&self, model: &Model) -> Vec<usize> {
        self.patterns.iter().map(|a| model.range_size(&a.pred)).collect()
    }

    /// Number of joint pattern states.
    pub fn joint_range(&self, model: &Model) -> usize {
        self.ranges(model).iter().product()
    }

    /// Pattern with the counted logvar put back under its display name.
    pub fn pattern_atom(&self, i: usize) -> Atom {
        let theta = Substitution::from_pairs([(hole(&self.domain), Term::var(self.name.clone(), self.domain.clone()))]);
        self.patterns[i].substitute(&theta)
    }
}

impl PartialEq for CountVar {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for CountVar {}

impl PartialOrd for CountVar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CountVar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

pub(crate) fn hole(domain: &str) -> Term {
    Term::var(HOLE, domain)
}

/// An axis of a counted cluster: a single (ground or representative) atom or a counting randvar.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Axis {
    Atom(Atom),
    Count(CountVar),
}

impl Axis {
    pub fn as_count(&self) -> Option<&CountVar> {
        match self {
            Axis::Count(c) => Some(c),
            Axis::Atom(_) => None,
        }
    }
}

/// Renders representatives under the name of the logvar they stand for.
#[derive(Clone, Debug, Default)]
pub struct Namer {
    pub origins: BTreeMap<Term, Term>,
}

impl Namer {
    pub fn term(&self, t: &Term) -> String {
        match t {
            Term::Rep { .. } => self.origins.get(t).map_or_else(|| t.name().to_string(), |x| x.name().to_string()),
            _ => t.name().to_string(),
        }
    }

    pub fn atom(&self, a: &Atom) -> String {
        if a.args.is_empty() {
            return a.pred.clone();
        }
        let args: Vec<String> = a.args.iter().map(|t| self.term(t)).collect();
        format!("{}({})", a.pred, args.join(","))
    }

    pub fn count(&self, c: &CountVar) -> String {
        let pats: Vec<String> = (0..c.patterns.len()).map(|i| self.atom(&c.pattern_atom(i))).collect();
        format!("#_{}[{}]", c.name, pats.join(","))
    }

    pub fn axis(&self, a: &Axis) -> String {
        match a {
            Axis::Atom(a) => self.atom(a),
            Axis::Count(c) => self.count(c),
        }
    }
}

fn base_name(v: &Term) -> String {
    v.name().trim_end_matches('\'').to_string()
}

/// Replace each group of 1-logvar entries that share a domain and exclusions by one
/// counting randvar. Entries with two or more logvars are returned as the error.
pub fn count_set(set: &SymSet, model: &Model) -> Result<Vec<Axis>, CAtom> {
    let mut out: BTreeSet<Axis> = BTreeSet::new();
    let mut groups: BTreeMap<(String, BTreeSet<Term>), (String, BTreeSet<Atom>)> = BTreeMap::new();
    for e in set {
        let vars = e.arg_vars();
        match vars.len() {
            0 => {
                out.insert(Axis::Atom(e.atom.clone()));
            }
            1 => {
                let v = &vars[0];
                let excluded: BTreeSet<Term> = e
                    .neq
                    .iter()
                    .filter_map(|(a, b)| {
                        if a == v {
                            Some(b.clone())
                        } else if b == v {
                            Some(a.clone())
                        } else {
                            None
                        }
                    })
                    .collect();
                if excluded.iter().any(Term::is_var) {
                    return Err(e.clone());
                }
                let theta = Substitution::from_pairs([(v.clone(), hole(v.domain()))]);
                let entry =
                    groups.entry((v.domain().to_string(), excluded)).or_insert_with(|| (base_name(v), BTreeSet::new()));
                entry.1.insert(e.atom.substitute(&theta));
            }
            _ => return Err(e.clone()),
        }
    }
    for ((domain, excluded), (name, patterns)) in groups {
        let size = model.domain_size(&domain).saturating_sub(excluded.len());
        out.insert(Axis::Count(CountVar { name, domain, excluded, patterns: patterns.into_iter().collect(), size }));
    }
    Ok(out.into_iter().collect())
}

impl fmt::Display for CountVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&Namer::default().count(self))
    }
}
