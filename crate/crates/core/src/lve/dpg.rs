use num_bigint::BigUint;
use num_traits::One;

use super::factor::{check_covered, describe, Engine, LiftedFactor, Part};
use super::hist::{marginal, state_projection};
use super::num::Ext;
use crate::analysis::{hole, Axis, CountVar};
use crate::combinat::binomial;
use crate::error::{Error, Result};
use crate::fotree::DpgNode;
use crate::model::{strides, unravel, Atom, Substitution};

/// An input atom about one representative of the group.
struct Indiv {
    rep: usize,
    pattern: Atom,
    stride: usize,
}

/// Number of groups of a DPG node.
pub fn group_count(d: &DpgNode, model: &crate::model::Model) -> BigUint {
    let size = model.domain_size(d.domain()).saturating_sub(d.excluded.len());
    binomial(size, d.k())
}

/// Combine the per-group function `input` (over the context of `T_x`) over all groups.
///
/// Without atoms on the representatives this is exponentiation by the group count.
/// Otherwise the result is written over the histogram of the counting randvar
/// in `target` that covers the group's patterns: with one representative every
/// object contributes its own factor, reading the rest of the population off the
/// histogram minus itself; with `k` representatives every multiset of `k` joint
/// states contributes with multiplicity `prod_s C(h_s, m_s)`.
pub fn dpg_product(e: &mut Engine<'_>, d: &DpgNode, input: &LiftedFactor, target: &[Axis]) -> Result<LiftedFactor> {
    let k = d.k();
    let groups = group_count(d, e.model);
    if groups == BigUint::ZERO {
        let dims = e.dims(target);
        let table = e.fill(&dims, |_| Ext::ONE);
        return Ok(LiftedFactor { axes: target.to_vec(), dims, table });
    }
    let in_strides = strides(&input.dims);
    let mut indiv: Vec<Indiv> = Vec::new();
    let mut others: Vec<(CountVar, usize)> = Vec::new();
    let mut shared: Vec<Axis> = Vec::new();
    let mut shared_parts: Vec<Part> = Vec::new();
    for (a, &stride) in input.axes.iter().zip(&in_strides) {
        match a {
            Axis::Atom(atom) => {
                let on: Vec<usize> = (0..k).filter(|&j| atom.mentions(&d.reps[j])).collect();
                match on.as_slice() {
                    [] => {}
                    [j] => {
                        let theta = Substitution::from_pairs([(d.reps[*j].clone(), hole(d.domain()))]);
                        indiv.push(Indiv { rep: *j, pattern: atom.substitute(&theta), stride });
                        continue;
                    }
                    _ => return Err(Error::Plan(format!("{atom} relates two representatives of one group"))),
                }
            }
            Axis::Count(c) => {
                let mut excl = d.excluded.clone();
                excl.insert(d.reps[0].clone());
                if k == 1 && c.domain == d.domain() && c.excluded == excl {
                    others.push((c.clone(), stride));
                    continue;
                }
                if d.reps.iter().any(|r| c.excluded.contains(r)) {
                    return Err(Error::Plan(format!("{} is not supported under a {k}-object group", describe(a))));
                }
            }
        }
        let (pos, lookup) = e.locate(target, a)?;
        shared.push(a.clone());
        shared_parts.push(Part { pos, stride, lookup });
    }
    let dims = e.dims(target);

    if indiv.is_empty() && others.is_empty() {
        check_covered(target, shared.iter())?;
        let table = e.fill(&dims, |vals| {
            let idx: usize = shared_parts.iter().map(|p| p.offset(vals)).sum();
            input.table[idx].pow_big(&groups)
        });
        return Ok(LiftedFactor { axes: target.to_vec(), dims, table });
    }

    let mut wanted: Vec<Atom> = indiv.iter().map(|i| i.pattern.clone()).collect();
    for (c, _) in &others {
        wanted.extend(c.patterns.iter().cloned());
    }
    let g_pos = target
        .iter()
        .position(|t| {
            t.as_count().is_some_and(|c| {
                c.domain == d.domain() && c.excluded == d.excluded && wanted.iter().all(|p| c.patterns.contains(p))
            })
        })
        .ok_or_else(|| Error::Plan(format!("no counting randvar for group patterns of {d}")))?;
    let g = target[g_pos].as_count().unwrap().clone();
    let rest: Vec<Axis> = target.iter().enumerate().filter(|&(i, _)| i != g_pos).map(|(_, a)| a.clone()).collect();
    check_covered(&rest, shared.iter())?;
    let shared_counts: Vec<&Atom> = shared
        .iter()
        .filter_map(Axis::as_count)
        .filter(|c| c.domain == g.domain && c.excluded == g.excluded)
        .flat_map(|c| c.patterns.iter())
        .collect();
    if let Some(p) = g.patterns.iter().find(|p| !wanted.contains(p) && !shared_counts.contains(p)) {
        return Err(Error::Plan(format!("pattern {p} of {g} is not covered")));
    }

    let ranges = g.ranges(e.model);
    let r: usize = ranges.iter().product();
    let space = e.space(&g);
    // state of each individual axis under each joint state
    let indiv_pos: Vec<usize> =
        indiv.iter().map(|i| g.patterns.iter().position(|p| *p == i.pattern).unwrap()).collect();
    let mut buf = vec![0; ranges.len()];
    let states: Vec<Vec<usize>> = (0..r)
        .map(|s| {
            unravel(s, &ranges, &mut buf);
            indiv_pos.iter().map(|&p| buf[p]).collect()
        })
        .collect();
    let all: Vec<usize> = (0..g.patterns.len()).collect();
    let mut other_maps = Vec::new();
    for (c, stride) in &others {
        if c.size + 1 != g.size {
            return Err(Error::Plan(format!("{c} does not leave out exactly one object of {g}")));
        }
        let pos: Vec<usize> = c.patterns.iter().map(|p| g.patterns.iter().position(|q| q == p).unwrap()).collect();
        let proj = state_projection(&all, &ranges, &pos).unwrap();
        let cr = c.joint_range(e.model);
        other_maps.push((proj, cr, e.space(c), *stride));
    }

    let table = if k == 1 {
        e.fill(&dims, |vals| {
            let base: usize = shared_parts.iter().map(|p| p.offset(vals)).sum();
            let h = &space.hists[vals[g_pos]];
            let mut acc = Ext::ONE;
            for s in 0..r {
                if h[s] == 0 {
                    continue;
                }
                let mut idx = base + indiv.iter().zip(&states[s]).map(|(i, &v)| i.stride * v).sum::<usize>();
                if !other_maps.is_empty() {
                    let mut rest = h.clone();
                    rest[s] -= 1;
                    for (proj, cr, cs, stride) in &other_maps {
                        idx += stride * cs.index_of(&marginal(&rest, proj, *cr)).expect("population shrinks by one");
                    }
                }
                acc *= input.table[idx].powu(h[s] as u64);
                if acc.is_zero() {
                    break;
                }
            }
            acc
        })
    } else {
        if !others.is_empty() {
            return Err(Error::Plan(format!("counting randvars under a {k}-object group")));
        }
        let per_rep = |j: usize| {
            let mut v: Vec<&Atom> = indiv.iter().filter(|i| i.rep == j).map(|i| &i.pattern).collect();
            v.sort();
            v
        };
        if (1..k).any(|j| per_rep(j) != per_rep(0)) {
            return Err(Error::Plan(format!("representatives of {d} carry different atoms")));
        }
        let multisets = multisets(r, k);
        e.fill(&dims, |vals| {
            let base: usize = shared_parts.iter().map(|p| p.offset(vals)).sum();
            let h = &space.hists[vals[g_pos]];
            let mut acc = Ext::ONE;
            for m in &multisets {
                let mut mult = BigUint::one();
                let mut cnt = vec![0; r];
                for &s in m {
                    cnt[s] += 1;
                }
                for s in 0..r {
                    mult *= binomial(h[s], cnt[s]);
                }
                if mult == BigUint::ZERO {
                    continue;
                }
                let idx = base + indiv.iter().enumerate().map(|(a, i)| i.stride * states[m[i.rep]][a]).sum::<usize>();
                acc *= input.table[idx].pow_big(&mult);
                if acc.is_zero() {
                    break;
                }
            }
            acc
        })
    };
    Ok(LiftedFactor { axes: target.to_vec(), dims, table })
}

/// Non-decreasing sequences of length `k` over `0..r`.
fn multisets(r: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, r: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for s in start..r {
            cur.push(s);
            go(s, r, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, r, k, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiset_counts() {
        assert_eq!(multisets(2, 2), vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(multisets(3, 2).len(), 6);
        assert_eq!(multisets(4, 3).len(), 20);
    }
}
