use std::collections::BTreeSet;

use num_bigint::BigUint;

use super::{Constraint, Model, Parfactor, Substitution, Term};
use crate::combinat::{binomial, permutations};
use crate::error::{Error, Result};

/// Outcome of decomposing a model into partial groundings over logvars `X`.
#[derive(Clone, Debug)]
pub struct DpgResult {
    /// The model with `X` replaced by the representative objects.
    pub rep_model: Model,
    pub logvars: Vec<Term>,
    pub reps: Vec<Term>,
    /// Terms (objects or outer representatives) that every `X_i` is constrained against.
    pub excluded: BTreeSet<Term>,
    /// Pairwise `x_i != x_j` plus `x_i != e` for each excluded term.
    pub constraint: Constraint,
    /// Number of constraint-satisfying k-subsets of the domain.
    pub group_count: BigUint,
    /// The k! renamings of the representatives; identity first.
    pub permutations: Vec<Substitution>,
}

/// Representative object name for logvar `X` at DPG node `tag`.
pub fn rep_name(logvar: &str, tag: usize) -> String {
    format!("{}_{tag}", logvar.to_lowercase())
}

/// `DPG(G, X)` with representative objects tagged `0`.
pub fn dpg(model: &Model, logvars: &[Term]) -> Result<DpgResult> {
    dpg_tagged(model, logvars, 0)
}

pub(crate) fn dpg_tagged(model: &Model, logvars: &[Term], tag: usize) -> Result<DpgResult> {
    let Some(first) = logvars.first() else {
        return Err(Error::DpgNotApplicable("empty logvar set".into()));
    };
    let domain = first.domain().to_string();
    if logvars.iter().any(|x| !x.is_var() || x.domain() != domain) {
        return Err(Error::DpgNotApplicable("logvars must share one domain".into()));
    }
    if model.parfactors.is_empty() {
        return Err(Error::DpgNotApplicable("empty model".into()));
    }
    let mut excluded: Option<BTreeSet<Term>> = None;
    for pf in &model.parfactors {
        let vars = pf.logvars();
        for x in logvars {
            if !vars.contains(x) {
                return Err(Error::DpgNotApplicable(format!("{x} does not occur in {pf}")));
            }
            for y in logvars {
                if x != y && !pf.constraint.contains(x, y) {
                    return Err(Error::DpgNotApplicable(format!("{x}!={y} missing in {pf}")));
                }
            }
            let own: BTreeSet<Term> = pf
                .constraint
                .iter()
                .filter_map(|(a, b)| {
                    let other = if a == x {
                        b
                    } else if b == x {
                        a
                    } else {
                        return None;
                    };
                    (!other.is_var()).then(|| other.clone())
                })
                .collect();
            match &excluded {
                None => excluded = Some(own),
                Some(e) if *e == own => {}
                Some(_) => {
                    return Err(Error::DpgNotApplicable(format!("{x} excludes different objects across parfactors")))
                }
            }
        }
    }
    let excluded = excluded.unwrap_or_default();

    let reps: Vec<Term> = logvars.iter().map(|x| Term::rep(rep_name(x.name(), tag), domain.clone())).collect();
    let to_reps = Substitution::from_pairs(logvars.iter().cloned().zip(reps.iter().cloned()));
    let parfactors = model
        .parfactors
        .iter()
        .map(|pf| {
            let mut out = pf.substitute(&to_reps).expect("logvars are pairwise constrained");
            out.constraint = drop_implied(&out.constraint);
            out
        })
        .collect();
    let rep_model = Model { domains: model.domains.clone(), preds: model.preds.clone(), parfactors };

    let mut constraint = Constraint::new();
    for (i, a) in reps.iter().enumerate() {
        for b in &reps[i + 1..] {
            constraint.insert(a.clone(), b.clone());
        }
        for e in &excluded {
            constraint.insert(a.clone(), e.clone());
        }
    }

    let k = logvars.len();
    let avail = model.domain_size(&domain).saturating_sub(excluded.len());
    let perms = permutations(k)
        .into_iter()
        .map(|p| Substitution::from_pairs(reps.iter().cloned().zip(p.iter().map(|&j| reps[j].clone()))))
        .collect();

    Ok(DpgResult {
        rep_model,
        logvars: logvars.to_vec(),
        reps,
        excluded,
        constraint,
        group_count: binomial(avail, k),
        permutations: perms,
    })
}

/// Inequalities between two non-logvar terms always hold once representatives
/// are pairwise distinct and distinct from the model's constants.
pub(crate) fn drop_implied(c: &Constraint) -> Constraint {
    let mut out = Constraint::new();
    for (a, b) in c.iter() {
        if a.is_var() || b.is_var() {
            out.insert(a.clone(), b.clone());
        }
    }
    out
}

impl DpgResult {
    /// The k! members of one group, as parfactor lists (one block per permutation).
    pub fn group_blocks(&self) -> Vec<Vec<Parfactor>> {
        self.permutations
            .iter()
            .map(|p| {
                self.rep_model
                    .parfactors
                    .iter()
                    .map(|pf| pf.substitute(p).expect("renaming keeps constraints"))
                    .collect()
            })
            .collect()
    }
}
