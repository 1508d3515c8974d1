use serde::{Deserialize, Serialize};

use super::symbolic::{
    fresh_name, intersect_sets, normalize_set, reps_to_vars, simplify, subtract_sets, unify, union, CAtom, Ctx, SymSet,
};
use super::{DpgNode, FoDtree, FoNodeKind, Universe};
use crate::model::{Constraint, Substitution, Term};

/// Symbolic rv, cutset, context, cluster and acutset per FO node.
///
/// Entries at a node are read with the representatives of its strict DPG
/// ancestors fixed; the sets are exact for the tree's current domain sizes.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct FoProps {
    pub rv: Vec<SymSet>,
    pub cutset: Vec<SymSet>,
    pub context: Vec<SymSet>,
    pub cluster: Vec<SymSet>,
    pub acutset: Vec<SymSet>,
    pub scope: Vec<Vec<Term>>,
}

pub fn compute_properties(t: &FoDtree) -> FoProps {
    let n = t.nodes.len();
    let universe = Universe::of(&t.model);
    let mut p = FoProps {
        rv: vec![Vec::new(); n],
        cutset: vec![Vec::new(); n],
        context: vec![Vec::new(); n],
        cluster: vec![Vec::new(); n],
        acutset: vec![Vec::new(); n],
        scope: t.scopes(),
    };
    let order = t.preorder();
    for &v in order.iter().rev() {
        let ctx = Ctx { universe: &universe, params: &p.scope[v] };
        let node = &t.nodes[v];
        p.rv[v] = match &node.kind {
            FoNodeKind::Leaf(pf) => normalize_set(&pf.atoms.iter().cloned().map(CAtom::plain).collect::<Vec<_>>(), ctx),
            FoNodeKind::Internal => node.children.iter().fold(Vec::new(), |acc, &c| union(&acc, &p.rv[c], ctx)),
            FoNodeKind::Dpg(d) => {
                let lifted: SymSet = p.rv[node.children[0]].iter().map(|e| lift(e, d)).collect();
                normalize_set(&lifted, ctx)
            }
        };
    }
    for &v in &order {
        let ctx = Ctx { universe: &universe, params: &p.scope[v] };
        let node = &t.nodes[v];
        let raw: SymSet = match &node.kind {
            FoNodeKind::Leaf(_) => Vec::new(),
            FoNodeKind::Internal => {
                let mut cut = Vec::new();
                for (i, &a) in node.children.iter().enumerate() {
                    for &b in &node.children[i + 1..] {
                        cut = union(&cut, &intersect_sets(&p.rv[a], &p.rv[b], ctx), ctx);
                    }
                }
                cut
            }
            FoNodeKind::Dpg(d) => dpg_cutset(&p.rv[node.children[0]], d, ctx),
        };
        let cut = subtract_sets(&raw, &p.acutset[v], ctx);
        p.context[v] = intersect_sets(&p.rv[v], &p.acutset[v], ctx);
        p.cluster[v] = if t.is_leaf(v) { p.rv[v].clone() } else { union(&cut, &p.context[v], ctx) };
        let child_acut = union(&p.acutset[v], &cut, ctx);
        for &c in &node.children {
            p.acutset[c] = child_acut.clone();
        }
        p.cutset[v] = cut;
    }
    p
}

fn group_constraint(ca: &mut CAtom, vars: &[Term], d: &DpgNode) {
    for (i, a) in vars.iter().enumerate() {
        for b in &vars[i + 1..] {
            ca.neq.insert(a.clone(), b.clone());
        }
        for e in &d.excluded {
            ca.neq.insert(a.clone(), e.clone());
        }
    }
}

/// Replace the node's representatives by logvars ranging over all groups.
pub(crate) fn lift(e: &CAtom, d: &DpgNode) -> CAtom {
    let (mut ca, vars) = reps_to_vars(e, &d.reps, &d.logvars);
    group_constraint(&mut ca, &vars, d);
    ca
}

/// Partial injections from the second copy's representatives into the first's, excluding bijections.
fn overlap_patterns(k: usize) -> Vec<Vec<Option<usize>>> {
    fn go(j: usize, k: usize, used: &mut Vec<bool>, cur: &mut Vec<Option<usize>>, out: &mut Vec<Vec<Option<usize>>>) {
        if j == k {
            if cur.iter().any(Option::is_none) {
                out.push(cur.clone());
            }
            return;
        }
        cur.push(None);
        go(j + 1, k, used, cur, out);
        cur.pop();
        for i in 0..k {
            if !used[i] {
                used[i] = true;
                cur.push(Some(i));
                go(j + 1, k, used, cur, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(0, k, &mut vec![false; k], &mut Vec::new(), &mut out);
    out
}

/// Ground atoms shared by the subtrees of two different groups.
fn dpg_cutset(inner: &[CAtom], d: &DpgNode, ctx: Ctx<'_>) -> SymSet {
    let mut out = Vec::new();
    for pattern in overlap_patterns(d.k()) {
        for e1 in inner {
            let (mut c1, v1) = reps_to_vars(e1, &d.reps, &d.logvars);
            group_constraint(&mut c1, &v1, d);
            for e2 in inner {
                let e2 = e2.rename_apart(&c1.var_names());
                let mut taken = c1.var_names();
                taken.extend(e2.var_names());
                let mut theta = Substitution::new();
                let mut v2 = Vec::new();
                for (j, r) in d.reps.iter().enumerate() {
                    let v = match pattern[j] {
                        Some(i) => v1[i].clone(),
                        None => {
                            let name = fresh_name(d.logvars[j].name(), &taken);
                            taken.insert(name.clone());
                            Term::var(name, r.domain())
                        }
                    };
                    theta.insert(r.clone(), v.clone());
                    v2.push(v);
                }
                let Some(mut c2) = e2.apply(&theta) else { continue };
                group_constraint(&mut c2, &v2, d);
                let mut cross = Constraint::new();
                for (i, a) in v1.iter().enumerate() {
                    if pattern.contains(&Some(i)) {
                        continue;
                    }
                    for (j, b) in v2.iter().enumerate() {
                        if pattern[j].is_none() {
                            cross.insert(a.clone(), b.clone());
                        }
                    }
                }
                for (a, b) in cross.iter() {
                    c2.neq.insert(a.clone(), b.clone());
                }
                if let Some((inst, _)) = unify(&c1, &c2) {
                    out.extend(simplify(&inst, ctx));
                }
            }
        }
    }
    normalize_set(&out, ctx)
}
