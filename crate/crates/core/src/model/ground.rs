use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Atom, Model, Parfactor, Substitution, Term};
use crate::propositional::Factor;

/// A ground randvar: predicate applied to an object tuple.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroundVar {
    pub pred: String,
    pub args: Vec<String>,
}

impl fmt::Display for GroundVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            f.write_str(&self.pred)
        } else {
            write!(f, "{}({})", self.pred, self.args.join(","))
        }
    }
}

/// The grounding of a model: interned randvars and one factor per grounding.
#[derive(Clone, Debug, Default)]
pub struct GroundModel {
    pub vars: Vec<GroundVar>,
    pub cards: Vec<usize>,
    pub factors: Vec<Factor>,
    index: HashMap<GroundVar, usize>,
}

impl GroundModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, var: GroundVar, card: usize) -> usize {
        if let Some(&id) = self.index.get(&var) {
            return id;
        }
        let id = self.vars.len();
        self.index.insert(var.clone(), id);
        self.vars.push(var);
        self.cards.push(card);
        id
    }

    pub fn lookup(&self, var: &GroundVar) -> Option<usize> {
        self.index.get(var).copied()
    }

    /// Ground an atom whose terms are all objects after `sigma`.
    pub fn ground_atom(atom: &Atom, sigma: &Substitution) -> GroundVar {
        GroundVar {
            pred: atom.pred.clone(),
            args: atom
                .args
                .iter()
                .map(|t| match sigma.apply(t) {
                    Term::Obj { name, .. } => name,
                    other => panic!("term {other} left ungrounded"),
                })
                .collect(),
        }
    }

    /// Add one factor for a parfactor whose atoms are ground under `sigma`.
    pub fn add_factor(&mut self, model: &Model, pf: &Parfactor, sigma: &Substitution) -> usize {
        let vars: Vec<usize> = pf
            .atoms
            .iter()
            .map(|a| {
                let card = model.range_size(&a.pred);
                self.intern(Self::ground_atom(a, sigma), card)
            })
            .collect();
        let cards = vars.iter().map(|&v| self.cards[v]).collect();
        self.factors.push(Factor::new(vars, cards, pf.table.clone()));
        self.factors.len() - 1
    }
}

/// All substitutions of `pf`'s logvars (after `base`) by domain objects that
/// satisfy its constraint, in lexicographic order of the logvar list.
pub(crate) fn groundings(model: &Model, pf: &Parfactor, base: &Substitution) -> Vec<Substitution> {
    let vars: Vec<Term> = pf.logvars().into_iter().filter(|v| base.get(v).is_none()).collect();
    let choices: Vec<Vec<Term>> = vars
        .iter()
        .map(|v| {
            model
                .domain(v.domain())
                .map(|d| d.objects.iter().map(|o| Term::obj(o.clone(), v.domain())).collect())
                .unwrap_or_default()
        })
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; vars.len()];
    if choices.iter().any(Vec::is_empty) {
        return out;
    }
    loop {
        let mut theta = base.clone();
        for (i, v) in vars.iter().enumerate() {
            theta.insert(v.clone(), choices[i][idx[i]].clone());
        }
        if pf.constraint.satisfied_by(|t| theta.apply(t).name().to_string()) {
            out.push(theta);
        }
        let mut i = vars.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < choices[i].len() {
                break;
            }
            idx[i] = 0;
        }
    }
}

/// The grounding `gr(G)`: one factor per constraint-satisfying grounding of each parfactor.
pub fn ground(model: &Model) -> GroundModel {
    let mut gm = GroundModel::new();
    for pf in &model.parfactors {
        for theta in groundings(model, pf, &Substitution::new()) {
            gm.add_factor(model, pf, &theta);
        }
    }
    gm
}
