use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::dpg::dpg_product;
use super::factor::{describe, Engine, LiftedFactor};
use super::num::Ext;
use crate::analysis::{Analysis, Axis, LiftedOp, OpKind};
use crate::error::{Error, Result};
use crate::fotree::{FoDtree, FoNodeKind};
use crate::model::strides;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpRecord {
    pub node: usize,
    pub label: String,
    /// Entries written by this step.
    pub entries: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Execution {
    /// Partition function; infinite past the `f64` range (see `log10_z`).
    pub z: f64,
    pub log10_z: f64,
    /// `z` in scientific notation, finite at any magnitude.
    pub z_text: String,
    /// Table entries written by products, eliminations and group operations.
    pub work: u64,
    pub trace: Vec<OpRecord>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExecOptions {
    /// Fill large tables with rayon when the `parallel` feature is on.
    pub parallel: bool,
}

impl Default for ExecOptions {
    fn default() -> Self {
        Self { parallel: cfg!(feature = "parallel") }
    }
}

pub fn execute_plan(t: &FoDtree, a: &Analysis, plan: &[LiftedOp]) -> Result<Execution> {
    execute_plan_with(t, a, plan, ExecOptions::default())
}

/// Run the plan bottom-up. Each node's table is formed over its counted cluster
/// (a DPG node's by its aggregation or counting op) and the node's eliminations
/// are then applied in plan order, which must leave exactly its counted context.
pub fn execute_plan_with(t: &FoDtree, a: &Analysis, plan: &[LiftedOp], opts: ExecOptions) -> Result<Execution> {
    if !a.liftable {
        return Err(Error::NotLiftable(a.offending.iter().map(|o| o.entry.clone()).collect::<Vec<_>>().join("; ")));
    }
    let parents = t.parents();
    let mut by_node: BTreeMap<usize, Vec<&LiftedOp>> = BTreeMap::new();
    let mut closed: BTreeSet<usize> = BTreeSet::new();
    let mut last = None;
    for op in plan {
        let n = op.node;
        if n >= t.nodes.len() {
            return Err(Error::Plan(format!("op {} names missing node {n}", op.label)));
        }
        if last != Some(n) {
            if closed.contains(&n) {
                return Err(Error::Plan(format!("ops of node {n} are not contiguous")));
            }
            if let Some(m) = last {
                closed.insert(m);
            }
            last = Some(n);
        }
        // an ancestor's ops may not precede this one
        let mut cur = n;
        while let Some(p) = parents[cur] {
            if by_node.contains_key(&p) {
                return Err(Error::Plan(format!("{} comes after an op of its ancestor {p}", op.label)));
            }
            cur = p;
        }
        by_node.entry(n).or_default().push(op);
    }
    let depth = t.depths();
    let mut schedule = t.preorder();
    schedule.sort_by_key(|&n| std::cmp::Reverse(depth[n]));

    let mut engine = Engine::new(&t.model, opts.parallel);
    let mut done: Vec<Option<LiftedFactor>> = vec![None; t.nodes.len()];
    let mut trace = Vec::new();
    for n in schedule {
        for &c in &t.nodes[n].children {
            if done[c].is_none() {
                return Err(Error::Plan(format!("node {n} is processed before its child {c}")));
            }
        }
        let ops = by_node.get(&n).cloned().unwrap_or_default();
        let before = engine.work.0;
        let (mut f, label) = match &t.nodes[n].kind {
            FoNodeKind::Leaf(pf) => (leaf_table(&mut engine, pf, &a.cluster[n])?, None),
            FoNodeKind::Internal => {
                let inputs: Vec<&LiftedFactor> =
                    t.nodes[n].children.iter().map(|&c| done[c].as_ref().unwrap()).collect();
                (engine.multiply_into(&a.cluster[n], &inputs)?, None)
            }
            FoNodeKind::Dpg(d) => {
                let tx = t.nodes[n].children[0];
                let first = ops.first().filter(|o| matches!(o.kind, OpKind::Agg { .. } | OpKind::Count { .. }));
                let Some(op) = first else {
                    return Err(Error::Plan(format!("DPG node {n} has no aggregation or counting op")));
                };
                let f = dpg_product(&mut engine, d, done[tx].as_ref().unwrap(), &a.cluster[n])?;
                (f, Some(op.label.clone()))
            }
        };
        if let Some(l) = label {
            trace.push(OpRecord { node: n, label: l, entries: engine.work.0 - before });
        } else if !matches!(t.nodes[n].kind, FoNodeKind::Leaf(_)) {
            trace.push(OpRecord { node: n, label: "⊗".into(), entries: engine.work.0 - before });
        }
        for op in &ops {
            match &op.kind {
                OpKind::Elim { target } => {
                    let before = engine.work.0;
                    f = engine.sum_out(&f, target)?;
                    trace.push(OpRecord { node: n, label: op.label.clone(), entries: engine.work.0 - before });
                }
                _ if t.dpg(n).is_some() && std::ptr::eq(*op, ops[0]) => {}
                _ => return Err(Error::Plan(format!("{} is misplaced at node {n}", op.label))),
            }
        }
        let have: BTreeSet<&Axis> = f.axes.iter().collect();
        let want: BTreeSet<&Axis> = a.context[n].iter().collect();
        if have != want {
            let extra: Vec<String> = have.difference(&want).map(|x| describe(x)).collect();
            let missing: Vec<String> = want.difference(&have).map(|x| describe(x)).collect();
            return Err(Error::Plan(format!(
                "node {n} ends over the wrong axes (left over: {:?}, missing: {:?})",
                extra, missing
            )));
        }
        done[n] = Some(f);
    }
    let root = done[t.root].take().ok_or_else(|| Error::Plan("root was not evaluated".into()))?;
    if !root.axes.is_empty() {
        return Err(Error::Plan("root table is not a scalar".into()));
    }
    let z = root.table[0];
    Ok(Execution { z: z.to_f64(), log10_z: z.log10(), z_text: z.to_string(), work: engine.work.0, trace })
}

/// The leaf's table laid out over its counted cluster. Leaves are read, not charged.
fn leaf_table(e: &mut Engine<'_>, pf: &crate::model::Parfactor, cluster: &[Axis]) -> Result<LiftedFactor> {
    let ranges: Vec<usize> = pf.atoms.iter().map(|x| e.model.range_size(&x.pred)).collect();
    let st = strides(&ranges);
    let pos: Vec<usize> = pf
        .atoms
        .iter()
        .map(|x| {
            cluster
                .iter()
                .position(|c| matches!(c, Axis::Atom(b) if b == x))
                .ok_or_else(|| Error::Plan(format!("leaf atom {x} is not in its cluster")))
        })
        .collect::<Result<_>>()?;
    let dims = e.dims(cluster);
    let size: usize = dims.iter().product();
    let mut vals = vec![0; dims.len()];
    let mut table = Vec::with_capacity(size);
    for i in 0..size {
        crate::model::unravel(i, &dims, &mut vals);
        table.push(pos.iter().zip(&st).map(|(&p, &s)| vals[p] * s).sum::<usize>());
    }
    let table = table.into_iter().map(|j| Ext::new(pf.table[j])).collect();
    Ok(LiftedFactor { axes: cluster.to_vec(), dims, table })
}
