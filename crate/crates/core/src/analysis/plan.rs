use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Analysis, Axis};
use crate::error::{Error, Result};
use crate::fotree::FoDtree;
use crate::model::Term;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum OpKind {
    Elim { target: Axis },
    Agg { logvars: Vec<Term> },
    Count { logvars: Vec<Term> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftedOp {
    pub node: usize,
    #[serde(flatten)]
    pub kind: OpKind,
    pub label: String,
}

impl fmt::Display for LiftedOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

fn logvar_list(xs: &[Term]) -> String {
    xs.iter().map(Term::name).collect::<Vec<_>>().join(",")
}

/// Operations read off a counted tree.
///
/// Each counted cluster entry not in the node's context is eliminated at that
/// node. A DPG node aggregates when the context of `T_x` mentions none of its
/// representatives and counts otherwise. Ops at deeper nodes come first (ties
/// left to right); within a node aggregation or counting precedes eliminations.
pub fn extract_plan(t: &FoDtree, a: &Analysis) -> Result<Vec<LiftedOp>> {
    if !a.liftable {
        let names: Vec<String> = a.offending.iter().map(|o| format!("node {}: {}", o.node, o.entry)).collect();
        return Err(Error::NotLiftable(names.join("; ")));
    }
    if !a.context[t.root].is_empty() || !a.props.context[t.root].is_empty() {
        return Err(Error::Plan("root has a nonempty context".into()));
    }
    let order = t.preorder();
    let depth = t.depths();
    let mut nodes = order.clone();
    let pos = |n: usize| order.iter().position(|&m| m == n).unwrap();
    nodes.sort_by_key(|&n| (std::cmp::Reverse(depth[n]), pos(n)));

    let mut plan = Vec::new();
    for n in nodes {
        if !a.props.context[n].is_empty() && a.context[n].is_empty() {
            return Err(Error::Plan(format!("context of node {n} could not be counted")));
        }
        if let Some(d) = t.dpg(n) {
            let tx = t.nodes[n].children[0];
            let reps: BTreeSet<&Term> = d.reps.iter().collect();
            let counts = a.props.context[tx].iter().any(|e| e.atom.args.iter().any(|arg| reps.contains(arg)));
            let (kind, label) = if counts {
                let label = if d.k() == 1 {
                    format!("#_{}", logvar_list(&d.logvars))
                } else {
                    format!("#_{{{}}}", logvar_list(&d.logvars))
                };
                (OpKind::Count { logvars: d.logvars.clone() }, label)
            } else {
                (OpKind::Agg { logvars: d.logvars.clone() }, format!("AGG({})", logvar_list(&d.logvars)))
            };
            plan.push(LiftedOp { node: n, kind, label });
        }
        let mut elims: Vec<LiftedOp> = a.cluster[n]
            .iter()
            .filter(|x| !a.context[n].contains(x))
            .map(|x| LiftedOp {
                node: n,
                kind: OpKind::Elim { target: x.clone() },
                label: format!("Σ{}", a.namer.axis(x)),
            })
            .collect();
        elims.sort_by(|p, q| p.label.cmp(&q.label));
        plan.extend(elims);
    }
    Ok(plan)
}
