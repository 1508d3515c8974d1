use std::collections::BTreeMap;

use super::{FoDtree, FoNodeKind};
use crate::combinat::k_subsets;
use crate::model::{GroundModel, Substitution, Term};
use crate::propositional::Dtree;

/// The ground dtree an FO-dtree stands for, with each ground node traced
/// back to the FO node and representative assignment it came from.
#[derive(Clone, Debug)]
pub struct GroundedTree {
    pub dtree: Dtree,
    pub model: GroundModel,
    /// `origin[g] = (fo_node, sigma)` where `sigma` maps representatives to objects.
    pub origin: Vec<(usize, BTreeMap<Term, String>)>,
}

/// Expand every DPG node into one child per constraint-satisfying object tuple.
pub fn ground_tree(t: &FoDtree) -> GroundedTree {
    let mut g = GroundedTree { dtree: Dtree::default(), model: GroundModel::new(), origin: Vec::new() };
    g.dtree.root = expand(t, t.root, &Substitution::new(), &mut g);
    g
}

fn expand(t: &FoDtree, n: usize, sigma: &Substitution, g: &mut GroundedTree) -> usize {
    let node = t.node(n);
    let id = match &node.kind {
        FoNodeKind::Leaf(pf) => {
            let f = g.model.add_factor(&t.model, pf, sigma);
            g.dtree.add_leaf(f)
        }
        FoNodeKind::Internal => {
            let children = node.children.iter().map(|&c| expand(t, c, sigma, g)).collect();
            g.dtree.add_internal(children)
        }
        FoNodeKind::Dpg(d) => {
            let objects = &t.model.domain(d.domain()).expect("domain checked").objects;
            let avail: Vec<&String> = objects
                .iter()
                .filter(|o| {
                    d.excluded.iter().all(|e| match sigma.apply(e) {
                        Term::Obj { name, .. } => name != **o,
                        _ => true,
                    })
                })
                .collect();
            let mut children = Vec::new();
            for subset in k_subsets(avail.len(), d.k()) {
                let mut inner = sigma.clone();
                for (r, &i) in d.reps.iter().zip(&subset) {
                    inner.insert(r.clone(), Term::obj(avail[i].clone(), d.domain()));
                }
                for &c in &node.children {
                    children.push(expand(t, c, &inner, g));
                }
            }
            g.dtree.add_internal(children)
        }
    };
    let named = sigma.map.iter().map(|(k, v)| (k.clone(), v.name().to_string())).collect();
    if g.origin.len() <= id {
        g.origin.resize(id + 1, (usize::MAX, BTreeMap::new()));
    }
    g.origin[id] = (n, named);
    id
}
