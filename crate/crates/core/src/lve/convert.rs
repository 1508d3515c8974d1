use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::hist::HistSpace;
use super::num::Ext;
use crate::analysis::{hole, CountVar};
use crate::combinat::{falling_factorial, pow_big};
use crate::error::{Error, Result};
use crate::model::{strides, unravel, Atom, Model, Parfactor, Substitution, Term};

/// A parfactor over pairwise distinct logvars of one domain rewritten as a
/// function of one counting randvar: row `i` of the table is raised to
/// `exponents[h][i]` under histogram `h`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountConversion {
    pub var: CountVar,
    pub hists: Vec<Vec<usize>>,
    pub exponents: Vec<Vec<BigUint>>,
    pub table: Vec<f64>,
}

impl CountConversion {
    /// Value of the converted factor at histogram `h`.
    pub fn value(&self, h: usize) -> f64 {
        self.table.iter().zip(&self.exponents[h]).map(|(&v, e)| pow_big(v, e)).product()
    }

    /// Sum over all assignments: histograms weighted by their multinomials.
    pub fn partition(&self, model: &Model) -> f64 {
        let space = HistSpace::new(self.var.size, self.var.joint_range(model));
        (0..self.hists.len()).map(|h| space.mul[h] * Ext::new(self.value(h))).sum::<Ext>().to_f64()
    }
}

/// Count-convert every logvar of `pf` at once.
///
/// Each atom must mention exactly one logvar and every logvar must carry the same
/// patterns. A table row assigns each logvar a joint state; the number of
/// injective groundings realizing it under histogram `h` is `prod_s (h_s)_(m_s)`
/// with `m_s` the number of logvars in state `s`.
pub fn count_convert(pf: &Parfactor, model: &Model) -> Result<CountConversion> {
    let logvars = pf.logvars();
    let Some(first) = logvars.first() else {
        return Err(Error::Semantic("count conversion needs a logvar".into()));
    };
    let domain = first.domain().to_string();
    if logvars.iter().any(|v| v.domain() != domain) {
        return Err(Error::Semantic("count conversion needs logvars of one domain".into()));
    }
    for (i, a) in logvars.iter().enumerate() {
        for b in &logvars[i + 1..] {
            if !pf.constraint.contains(a, b) {
                return Err(Error::Semantic(format!("{a} and {b} are not constrained apart")));
            }
        }
    }
    let mut excluded: Option<BTreeSet<Term>> = None;
    for v in &logvars {
        let ex: BTreeSet<Term> = pf
            .constraint
            .iter()
            .filter_map(|(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .filter(|t| !t.is_var())
            .cloned()
            .collect();
        if excluded.get_or_insert_with(|| ex.clone()) != &ex {
            return Err(Error::Semantic("logvars exclude different objects".into()));
        }
    }
    let excluded = excluded.unwrap_or_default();

    // (logvar index, pattern) per atom position
    let mut slots: Vec<(usize, Atom)> = Vec::new();
    for atom in &pf.atoms {
        let on: Vec<usize> = (0..logvars.len()).filter(|&i| atom.mentions(&logvars[i])).collect();
        let [i] = on.as_slice() else {
            return Err(Error::Semantic(format!("{atom} must mention exactly one logvar")));
        };
        let theta = Substitution::from_pairs([(logvars[*i].clone(), hole(&domain))]);
        slots.push((*i, atom.substitute(&theta)));
    }
    let patterns: Vec<Atom> = slots.iter().map(|(_, p)| p.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    for (i, v) in logvars.iter().enumerate() {
        let mine: BTreeSet<&Atom> = slots.iter().filter(|(j, _)| *j == i).map(|(_, p)| p).collect();
        if mine.len() != patterns.len() {
            return Err(Error::Semantic(format!("{v} does not carry every pattern")));
        }
    }
    let size = model.domain_size(&domain).saturating_sub(excluded.len());
    let var = CountVar { name: first.name().to_string(), domain, excluded, patterns, size };
    let pranges = var.ranges(model);
    let pstrides = strides(&pranges);
    let r: usize = pranges.iter().product();
    let space = HistSpace::new(size, r);

    let aranges: Vec<usize> = pf.atoms.iter().map(|a| model.range_size(&a.pred)).collect();
    // joint state per logvar for each row, or None when duplicated atoms disagree
    let mut vals = vec![0; aranges.len()];
    let row_states: Vec<Option<Vec<usize>>> = (0..pf.table.len())
        .map(|row| {
            unravel(row, &aranges, &mut vals);
            let mut state: Vec<Vec<Option<usize>>> = vec![vec![None; var.patterns.len()]; logvars.len()];
            for ((i, p), &v) in slots.iter().zip(&vals) {
                let k = var.patterns.iter().position(|q| q == p).unwrap();
                match state[*i][k] {
                    Some(w) if w != v => return None,
                    _ => state[*i][k] = Some(v),
                }
            }
            Some(state.iter().map(|s| s.iter().zip(&pstrides).map(|(v, st)| v.unwrap() * st).sum()).collect())
        })
        .collect();
    let exponents = space
        .hists
        .iter()
        .map(|h| {
            row_states
                .iter()
                .map(|st| {
                    let Some(st) = st else { return BigUint::ZERO };
                    let mut m = vec![0; r];
                    for &s in st {
                        m[s] += 1;
                    }
                    (0..r).fold(BigUint::one(), |acc, s| acc * falling_factorial(h[s], m[s]))
                })
                .collect()
        })
        .collect();
    Ok(CountConversion { var, hists: space.hists.clone(), exponents, table: pf.table.clone() })
}
