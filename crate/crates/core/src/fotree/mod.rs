//! First-order decomposition trees.
//!
//! A tree mixes ordinary internal nodes, leaves holding (representative)
//! factors, and DPG nodes `∀x:C` that stand for all isomorphic partial
//! groundings of their subtree. The single child of a DPG node is `T_x`; for
//! `k >= 2` its `k!` children are the permuted copies of one canonical block,
//! and for `k = 1` the block root itself plays the role of `T_x`.

mod agreement;
mod grounding;
mod props;
pub mod symbolic;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{relevant_constants, Constraint, Model, Parfactor, Term};

pub use agreement::{check_agreement, Mismatch};
pub use grounding::{ground_tree, GroundedTree};
pub use props::{compute_properties, FoProps};
pub use symbolic::{image, image_set, rep_intersect, CAtom, Ctx, SymSet};
pub use validate::{validate, Violation};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DpgNode {
    /// Tag used to name the representative objects.
    pub tag: usize,
    pub logvars: Vec<Term>,
    pub reps: Vec<Term>,
    /// `x_i != x_j` for all pairs plus `x_i != e` for every excluded term.
    pub constraint: Constraint,
    /// Objects and outer representatives each `X_i` is constrained against.
    pub excluded: BTreeSet<Term>,
}

impl DpgNode {
    pub fn k(&self) -> usize {
        self.reps.len()
    }

    pub fn domain(&self) -> &str {
        self.reps[0].domain()
    }
}

impl fmt::Display for DpgNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let reps: Vec<&str> = self.reps.iter().map(Term::name).collect();
        write!(f, "∀{}", reps.join(","))?;
        if !self.constraint.is_empty() {
            write!(f, ":{}", self.constraint)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum FoNodeKind {
    Internal,
    Dpg(DpgNode),
    Leaf(Parfactor),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoNode {
    pub kind: FoNodeKind,
    pub children: Vec<usize>,
}

/// Which construction produced a tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Builder {
    Basic,
    Greedy,
    Manual,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoDtree {
    pub nodes: Vec<FoNode>,
    pub root: usize,
    /// The normalized model the tree decomposes (domains and predicates are read from it).
    pub model: Model,
    pub builder: Builder,
}

impl FoDtree {
    pub fn new(model: Model, builder: Builder) -> Self {
        Self { nodes: Vec::new(), root: 0, model, builder }
    }

    pub fn add(&mut self, kind: FoNodeKind, children: Vec<usize>) -> usize {
        self.nodes.push(FoNode { kind, children });
        self.nodes.len() - 1
    }

    pub fn add_leaf(&mut self, pf: Parfactor) -> usize {
        self.add(FoNodeKind::Leaf(pf), vec![])
    }

    pub fn node(&self, n: usize) -> &FoNode {
        &self.nodes[n]
    }

    pub fn dpg(&self, n: usize) -> Option<&DpgNode> {
        match &self.nodes[n].kind {
            FoNodeKind::Dpg(d) => Some(d),
            _ => None,
        }
    }

    pub fn is_leaf(&self, n: usize) -> bool {
        matches!(self.nodes[n].kind, FoNodeKind::Leaf(_))
    }

    /// Reachable nodes, parents first, children left to right.
    pub fn preorder(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![self.root];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(self.nodes[n].children.iter().rev());
        }
        out
    }

    pub fn parents(&self) -> Vec<Option<usize>> {
        let mut p = vec![None; self.nodes.len()];
        for n in self.preorder() {
            for &c in &self.nodes[n].children {
                p[c] = Some(n);
            }
        }
        p
    }

    pub fn depths(&self) -> Vec<usize> {
        let mut d = vec![0; self.nodes.len()];
        for n in self.preorder() {
            for &c in &self.nodes[n].children {
                d[c] = d[n] + 1;
            }
        }
        d
    }

    /// Representative objects in scope at each node: those introduced by strict DPG ancestors.
    pub fn scopes(&self) -> Vec<Vec<Term>> {
        let mut s: Vec<Vec<Term>> = vec![Vec::new(); self.nodes.len()];
        for n in self.preorder() {
            let mut inner = s[n].clone();
            if let Some(d) = self.dpg(n) {
                inner.extend(d.reps.iter().cloned());
            }
            for &c in &self.nodes[n].children {
                s[c] = inner.clone();
            }
        }
        s
    }

    pub fn node_count(&self) -> usize {
        self.preorder().len()
    }

    pub fn dpg_count(&self) -> usize {
        self.preorder().into_iter().filter(|&n| self.dpg(n).is_some()).count()
    }

    /// Relevant constants per domain of the decomposed model.
    pub fn constants(&self) -> BTreeMap<String, BTreeSet<String>> {
        relevant_constants(&self.model)
    }

    /// Logvar name a representative object stands for, if it was introduced by a DPG node of this tree.
    pub fn rep_origins(&self) -> BTreeMap<Term, Term> {
        let mut out = BTreeMap::new();
        for n in &self.nodes {
            if let FoNodeKind::Dpg(d) = &n.kind {
                for (r, x) in d.reps.iter().zip(&d.logvars) {
                    out.insert(r.clone(), x.clone());
                }
            }
        }
        out
    }

    /// Same tree with the model's domains replaced (e.g. resized); structure is domain independent.
    pub fn with_model(&self, model: Model) -> FoDtree {
        FoDtree { model, ..self.clone() }
    }

    /// Short label: `∀x:C` for DPG nodes, the factor for leaves, `·` otherwise.
    pub fn label(&self, n: usize) -> String {
        match &self.nodes[n].kind {
            FoNodeKind::Internal => "·".to_string(),
            FoNodeKind::Dpg(d) => d.to_string(),
            FoNodeKind::Leaf(pf) => pf.to_string(),
        }
    }
}

/// Sizes and constant counts needed to reason about object availability.
#[derive(Clone, Debug)]
pub struct Universe {
    pub sizes: BTreeMap<String, usize>,
    pub constants: BTreeMap<String, usize>,
}

impl Universe {
    pub fn of(model: &Model) -> Self {
        let constants = relevant_constants(model).into_iter().map(|(d, c)| (d, c.len())).collect();
        let sizes = model.domains.iter().map(|d| (d.name.clone(), d.size())).collect();
        Self { sizes, constants }
    }

    /// Objects of `domain` that are not relevant constants.
    pub fn free_objects(&self, domain: &str) -> usize {
        let n = self.sizes.get(domain).copied().unwrap_or(0);
        n.saturating_sub(self.constants.get(domain).copied().unwrap_or(0))
    }
}
