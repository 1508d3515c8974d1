use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{FoDtree, FoNodeKind};
use crate::combinat::permutations;
use crate::model::{Substitution, Term};

/// A failed well-formedness condition at a node.
///
/// 1: tree shape (single parent, DPG nodes have one child, internal nodes have children);
/// 2: leaves hold factors without logvars; 3: each representative in a leaf is introduced
/// by exactly one DPG ancestor; 4: leaves below a DPG node mention all its representatives;
/// 5: `T_x` has `k!` children that are the permuted copies of its first child.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub node: usize,
    pub condition: u8,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "node {}: condition {}: {}", self.node, self.condition, self.message)
    }
}

pub fn validate(t: &FoDtree) -> Vec<Violation> {
    let mut out = Vec::new();

    if t.root >= t.nodes.len() {
        push(&mut out, t.root, 1, "root out of range".into());
        return out;
    }
    let mut seen = vec![0usize; t.nodes.len()];
    let mut stack = vec![t.root];
    while let Some(n) = stack.pop() {
        seen[n] += 1;
        if seen[n] > 1 {
            push(&mut out, n, 1, "node reached twice".into());
            continue;
        }
        for &c in &t.nodes[n].children {
            if c >= t.nodes.len() {
                push(&mut out, n, 1, format!("child {c} out of range"));
            } else {
                stack.push(c);
            }
        }
    }
    if out.iter().any(|v| v.condition == 1) {
        return out;
    }

    // introducing DPG ancestors of every node, outermost first
    let mut intro: Vec<Vec<usize>> = vec![Vec::new(); t.nodes.len()];
    for n in t.preorder() {
        let mut inner = intro[n].clone();
        if t.dpg(n).is_some() {
            inner.push(n);
        }
        for &c in &t.nodes[n].children {
            intro[c] = inner.clone();
        }
    }

    for n in t.preorder() {
        let node = &t.nodes[n];
        match &node.kind {
            FoNodeKind::Internal if node.children.is_empty() => {
                push(&mut out, n, 1, "internal node without children".into())
            }
            FoNodeKind::Dpg(_) if node.children.len() != 1 => {
                push(&mut out, n, 1, format!("DPG node has {} children, expected 1", node.children.len()))
            }
            FoNodeKind::Leaf(_) if !node.children.is_empty() => push(&mut out, n, 2, "leaf with children".into()),
            FoNodeKind::Leaf(pf) => {
                if !pf.logvars().is_empty() {
                    push(&mut out, n, 2, format!("leaf factor {pf} still has logvars"));
                }
                let reps: BTreeSet<&Term> =
                    pf.atoms.iter().flat_map(|a| a.args.iter()).filter(|a| a.is_rep()).collect();
                for r in &reps {
                    let owners = intro[n].iter().filter(|&&d| t.dpg(d).unwrap().reps.contains(r)).count();
                    if owners != 1 {
                        push(&mut out, n, 3, format!("{r} is introduced by {owners} DPG ancestors"));
                    }
                }
                for &d in &intro[n] {
                    for r in &t.dpg(d).unwrap().reps {
                        if !reps.contains(r) {
                            push(&mut out, n, 4, format!("leaf below node {d} does not mention {r}"));
                        }
                    }
                }
            }
            _ => {}
        }
        if let Some(d) = t.dpg(n) {
            if d.k() >= 2 && node.children.len() == 1 {
                let tx = node.children[0];
                if let Err(msg) = check_permuted_children(t, tx, &d.reps) {
                    push(&mut out, tx, 5, msg);
                }
            }
        }
    }
    out
}

fn push(out: &mut Vec<Violation>, node: usize, condition: u8, message: String) {
    out.push(Violation { node, condition, message });
}

fn check_permuted_children(t: &FoDtree, tx: usize, reps: &[Term]) -> Result<(), String> {
    let children = &t.nodes[tx].children;
    let k = reps.len();
    let perms = permutations(k);
    if children.len() != perms.len() {
        return Err(format!("T_x has {} children, expected {}", children.len(), perms.len()));
    }
    // multisets: a symmetric child may equal its own permuted copy
    let mut siblings: Vec<String> = children.iter().map(|&c| signature(t, c, &Substitution::new())).collect();
    let mut generated: Vec<String> = perms
        .iter()
        .map(|p| {
            let theta = Substitution::from_pairs(reps.iter().cloned().zip(p.iter().map(|&j| reps[j].clone())));
            signature(t, children[0], &theta)
        })
        .collect();
    siblings.sort();
    generated.sort();
    if siblings != generated {
        return Err("children are not the permuted copies of the first child".into());
    }
    Ok(())
}

/// Structural fingerprint of a subtree after renaming, with children unordered.
fn signature(t: &FoDtree, n: usize, theta: &Substitution) -> String {
    let node = &t.nodes[n];
    let head = match &node.kind {
        FoNodeKind::Internal => "I".to_string(),
        FoNodeKind::Dpg(d) => format!("D{:?}{:?}", d.reps, d.constraint.substitute(theta)),
        FoNodeKind::Leaf(pf) => match pf.substitute(theta) {
            Some(p) => format!("L{p}{:?}", p.table),
            None => "L".to_string(),
        },
    };
    let mut kids: Vec<String> = node.children.iter().map(|&c| signature(t, c, theta)).collect();
    kids.sort();
    format!("{head}[{}]", kids.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fotree::{Builder, DpgNode};
    use crate::model::{Atom, Constraint, Domain, Model, Parfactor, PredDecl};

    fn model() -> Model {
        Model {
            domains: vec![Domain::numbered("P", 3)],
            preds: vec![PredDecl::boolean("F", vec!["P".into(), "P".into()])],
            parfactors: vec![],
        }
    }

    fn leaf(a: &str, b: &str) -> Parfactor {
        Parfactor {
            atoms: vec![Atom::new("F", vec![Term::rep(a, "P"), Term::rep(b, "P")])],
            constraint: Constraint::new(),
            table: vec![1.0, 1.0],
        }
    }

    fn dpg2() -> DpgNode {
        let reps = vec![Term::rep("x_0", "P"), Term::rep("y_0", "P")];
        let mut c = Constraint::new();
        c.insert(reps[0].clone(), reps[1].clone());
        DpgNode {
            tag: 0,
            logvars: vec![Term::var("X", "P"), Term::var("Y", "P")],
            reps,
            constraint: c,
            excluded: BTreeSet::new(),
        }
    }

    #[test]
    fn unintroduced_rep_is_condition_3() {
        let mut t = FoDtree::new(model(), Builder::Manual);
        t.root = t.add_leaf(leaf("x_0", "y_0"));
        let v = validate(&t);
        assert!(v.iter().any(|v| v.condition == 3), "{v:?}");
    }

    #[test]
    fn single_child_for_k2_is_condition_5() {
        let mut t = FoDtree::new(model(), Builder::Manual);
        let l = t.add_leaf(leaf("x_0", "y_0"));
        let tx = t.add(FoNodeKind::Internal, vec![l]);
        t.root = t.add(FoNodeKind::Dpg(dpg2()), vec![tx]);
        let v = validate(&t);
        assert!(v.iter().any(|v| v.condition == 5 && v.node == tx), "{v:?}");
    }

    #[test]
    fn permuted_pair_is_valid() {
        let mut t = FoDtree::new(model(), Builder::Manual);
        let a = t.add_leaf(leaf("x_0", "y_0"));
        let b = t.add_leaf(leaf("y_0", "x_0"));
        let tx = t.add(FoNodeKind::Internal, vec![a, b]);
        t.root = t.add(FoNodeKind::Dpg(dpg2()), vec![tx]);
        assert!(validate(&t).is_empty());
    }
}
