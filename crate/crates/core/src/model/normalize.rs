use std::collections::{BTreeMap, BTreeSet};

use super::{strides, unravel, Atom, Model, Parfactor, Substitution, Term};
use crate::error::Result;

/// Constants of each domain that occur anywhere in the model's atoms or constraints.
pub fn relevant_constants(model: &Model) -> BTreeMap<String, BTreeSet<String>> {
    let mut out: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut note = |t: &Term| {
        if let Term::Obj { name, domain } = t {
            out.entry(domain.clone()).or_default().insert(name.clone());
        }
    };
    for pf in &model.parfactors {
        for a in &pf.atoms {
            a.args.iter().for_each(&mut note);
        }
        for (a, b) in pf.constraint.iter() {
            note(a);
            note(b);
        }
    }
    out
}

/// Rewrite the model so that every pair of co-domain logvars in a parfactor is
/// constrained unequal, and every logvar is constrained unequal to each
/// constant of its domain mentioned in the model. Missing inequalities are
/// case-split into the constrained case and the merged (diagonal) case.
pub fn normalize(model: &Model) -> Result<Model> {
    model.check()?;
    let constants = relevant_constants(model);
    let mut parfactors = Vec::new();
    for pf in &model.parfactors {
        let mut stack = vec![pf.clone()];
        // depth-first keeps the output order deterministic: constrained case first
        while let Some(pf) = stack.pop() {
            match find_split(&pf, &constants) {
                None => parfactors.push(pf),
                Some((x, t)) => {
                    let mut theta = Substitution::new();
                    theta.insert(x.clone(), t.clone());
                    let merged = pf.substitute(&theta).map(|p| merge_duplicate_atoms(&p, model));
                    let mut constrained = pf;
                    constrained.constraint.insert(x, t);
                    if let Some(m) = merged {
                        stack.push(m);
                    }
                    stack.push(constrained);
                }
            }
        }
    }
    Ok(Model { domains: model.domains.clone(), preds: model.preds.clone(), parfactors })
}

/// First missing inequality: a logvar pair, or a logvar against a relevant constant.
/// Returns `(from, to)` so that substituting `from -> to` gives the diagonal case.
fn find_split(pf: &Parfactor, constants: &BTreeMap<String, BTreeSet<String>>) -> Option<(Term, Term)> {
    let vars = pf.logvars();
    for (i, x) in vars.iter().enumerate() {
        for y in &vars[i + 1..] {
            if x.domain() == y.domain() && !pf.constraint.contains(x, y) {
                return Some((y.clone(), x.clone()));
            }
        }
    }
    for x in &vars {
        if let Some(cs) = constants.get(x.domain()) {
            for c in cs {
                let c = Term::obj(c.clone(), x.domain());
                if !pf.constraint.contains(x, &c) {
                    return Some((x.clone(), c));
                }
            }
        }
    }
    None
}

/// Collapse repeated atoms, reindexing the table onto the diagonal.
pub(crate) fn merge_duplicate_atoms(pf: &Parfactor, model: &Model) -> Parfactor {
    let mut distinct: Vec<Atom> = Vec::new();
    let mut position = Vec::with_capacity(pf.atoms.len());
    for a in &pf.atoms {
        match distinct.iter().position(|d| d == a) {
            Some(p) => position.push(p),
            None => {
                position.push(distinct.len());
                distinct.push(a.clone());
            }
        }
    }
    if distinct.len() == pf.atoms.len() {
        return pf.clone();
    }
    let old_cards: Vec<usize> = pf.atoms.iter().map(|a| model.range_size(&a.pred)).collect();
    let new_cards: Vec<usize> = distinct.iter().map(|a| model.range_size(&a.pred)).collect();
    let old_strides = strides(&old_cards);
    let size: usize = new_cards.iter().product();
    let mut vals = vec![0; new_cards.len()];
    let table = (0..size)
        .map(|idx| {
            unravel(idx, &new_cards, &mut vals);
            let old: usize = position.iter().enumerate().map(|(i, &p)| vals[p] * old_strides[i]).sum();
            pf.table[old]
        })
        .collect();
    Parfactor { atoms: distinct, constraint: pf.constraint.clone(), table }
}
