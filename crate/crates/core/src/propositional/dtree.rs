use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::factor::{multiply_all, sum_out, Factor, Work};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DtreeNode {
    pub children: Vec<usize>,
    /// Index into the factor list for leaves.
    pub factor: Option<usize>,
}

/// Rooted tree of arbitrary arity whose leaves hold factors.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Dtree {
    pub nodes: Vec<DtreeNode>,
    pub root: usize,
}

impl Dtree {
    pub fn leaf(factor: usize) -> Self {
        Self { nodes: vec![DtreeNode { children: vec![], factor: Some(factor) }], root: 0 }
    }

    pub fn add_leaf(&mut self, factor: usize) -> usize {
        self.nodes.push(DtreeNode { children: vec![], factor: Some(factor) });
        self.nodes.len() - 1
    }

    pub fn add_internal(&mut self, children: Vec<usize>) -> usize {
        self.nodes.push(DtreeNode { children, factor: None });
        self.nodes.len() - 1
    }

    pub fn is_leaf(&self, n: usize) -> bool {
        self.nodes[n].factor.is_some()
    }

    /// Nodes reachable from the root, parents before children.
    pub fn preorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![self.root];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(self.nodes[n].children.iter().rev());
        }
        out
    }

    pub fn leaf_factors(&self) -> Vec<usize> {
        self.preorder().into_iter().filter_map(|n| self.nodes[n].factor).collect()
    }
}

/// Per-node rv, cutset, context and cluster, indexed by node id.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DtreeProps {
    pub rv: Vec<BTreeSet<usize>>,
    pub cutset: Vec<BTreeSet<usize>>,
    pub context: Vec<BTreeSet<usize>>,
    pub cluster: Vec<BTreeSet<usize>>,
    pub acutset: Vec<BTreeSet<usize>>,
}

impl DtreeProps {
    /// Max cluster size minus one (zero for an empty tree).
    pub fn width(&self, tree: &Dtree) -> usize {
        tree.preorder().into_iter().map(|n| self.cluster[n].len()).max().unwrap_or(0).saturating_sub(1)
    }
}

pub fn dtree_properties(tree: &Dtree, factors: &[Factor]) -> DtreeProps {
    let n = tree.nodes.len();
    let mut p = DtreeProps {
        rv: vec![BTreeSet::new(); n],
        cutset: vec![BTreeSet::new(); n],
        context: vec![BTreeSet::new(); n],
        cluster: vec![BTreeSet::new(); n],
        acutset: vec![BTreeSet::new(); n],
    };
    let order = tree.preorder();
    for &v in order.iter().rev() {
        let node = &tree.nodes[v];
        p.rv[v] = match node.factor {
            Some(f) => factors[f].vars.iter().copied().collect(),
            None => node.children.iter().flat_map(|&c| p.rv[c].iter().copied()).collect(),
        };
    }
    for &v in &order {
        let node = &tree.nodes[v];
        let mut cut = BTreeSet::new();
        for (i, &a) in node.children.iter().enumerate() {
            for &b in &node.children[i + 1..] {
                cut.extend(p.rv[a].intersection(&p.rv[b]).copied());
            }
        }
        let cut: BTreeSet<usize> = cut.difference(&p.acutset[v]).copied().collect();
        p.context[v] = p.rv[v].intersection(&p.acutset[v]).copied().collect();
        p.cluster[v] =
            if node.factor.is_some() { p.rv[v].clone() } else { cut.union(&p.context[v]).copied().collect() };
        let child_acut: BTreeSet<usize> = p.acutset[v].union(&cut).copied().collect();
        for &c in &node.children {
            p.acutset[c] = child_acut.clone();
        }
        p.cutset[v] = cut;
    }
    p
}

fn message(tree: &Dtree, props: &DtreeProps, factors: &[Factor], v: usize) -> Result<(Factor, Work)> {
    let node = &tree.nodes[v];
    let mut work = Work::default();
    let mut f = match node.factor {
        Some(i) => factors[i].clone(),
        None => {
            let msgs = child_messages(tree, props, factors, &node.children)?;
            let mut refs = Vec::with_capacity(msgs.len());
            for (m, w) in &msgs {
                work.0 += w.0;
                refs.push(m);
            }
            if refs.is_empty() {
                Factor::scalar(1.0)
            } else if refs.len() == 1 {
                refs[0].clone()
            } else {
                multiply_all(&refs, &mut work)?
            }
        }
    };
    // eliminate cluster \ context in increasing id order
    let elim: Vec<usize> =
        f.vars.iter().copied().filter(|x| !props.context[v].contains(x)).collect::<BTreeSet<_>>().into_iter().collect();
    for x in elim {
        f = sum_out(&f, x, &mut work)?;
    }
    Ok((f, work))
}

#[cfg(feature = "parallel")]
fn child_messages(
    tree: &Dtree,
    props: &DtreeProps,
    factors: &[Factor],
    children: &[usize],
) -> Result<Vec<(Factor, Work)>> {
    use rayon::prelude::*;
    children.par_iter().map(|&c| message(tree, props, factors, c)).collect()
}

#[cfg(not(feature = "parallel"))]
fn child_messages(
    tree: &Dtree,
    props: &DtreeProps,
    factors: &[Factor],
    children: &[usize],
) -> Result<Vec<(Factor, Work)>> {
    children.iter().map(|&c| message(tree, props, factors, c)).collect()
}

/// Partition function by node-local elimination: at each node the children's
/// messages are multiplied and `cluster \ context` is summed out.
/// Returns `Z` and the number of table entries written.
pub fn ve_over_dtree(tree: &Dtree, props: &DtreeProps, factors: &[Factor]) -> Result<(f64, Work)> {
    let (f, work) = message(tree, props, factors, tree.root)?;
    debug_assert!(f.vars.is_empty());
    Ok((f.table[0], work))
}
