//! Counted clusters, the liftability test, operation plans, lifted width and cost bounds.

mod cost;
mod count;
mod plan;
mod report;

use serde::{Deserialize, Serialize};

use crate::fotree::{compute_properties, FoDtree, FoProps};

pub use cost::{estimate_cost, ground_node_count, lifted_width, CostEstimate, HistogramRange, LiftedWidth};
pub use count::{count_set, Axis, CountVar, Namer};
pub use plan::{extract_plan, LiftedOp, OpKind};
pub use report::{report, NodeClusters, Report};

#[allow(unused_imports)]
pub(crate) use count::{hole, HOLE};

/// A cluster entry with two or more logvars.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Offending {
    pub node: usize,
    pub entry: String,
}

/// Properties of a tree together with its counted clusters and contexts.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub props: FoProps,
    pub liftable: bool,
    pub offending: Vec<Offending>,
    /// Counted cluster per node (empty where the cluster could not be counted).
    pub cluster: Vec<Vec<Axis>>,
    pub context: Vec<Vec<Axis>>,
    pub namer: Namer,
}

pub fn analyze(t: &FoDtree) -> Analysis {
    analyze_with(t, compute_properties(t))
}

pub fn analyze_with(t: &FoDtree, props: FoProps) -> Analysis {
    let n = t.nodes.len();
    let namer = Namer { origins: t.rep_origins() };
    let mut a = Analysis {
        props,
        liftable: true,
        offending: Vec::new(),
        cluster: vec![Vec::new(); n],
        context: vec![Vec::new(); n],
        namer,
    };
    for v in t.preorder() {
        match count_set(&a.props.cluster[v], &t.model) {
            Ok(axes) => a.cluster[v] = axes,
            Err(e) => {
                a.liftable = false;
                a.offending.push(Offending { node: v, entry: e.to_string() });
            }
        }
        if let Ok(axes) = count_set(&a.props.context[v], &t.model) {
            a.context[v] = axes;
        }
    }
    a
}

impl Analysis {
    /// Counted cluster entries rendered with representatives shown as logvars.
    pub fn cluster_labels(&self, v: usize) -> Vec<String> {
        self.cluster[v].iter().map(|x| self.namer.axis(x)).collect()
    }

    pub fn context_labels(&self, v: usize) -> Vec<String> {
        self.context[v].iter().map(|x| self.namer.axis(x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build::build_basic;
    use crate::corpus::load;

    #[test]
    fn transitivity_is_not_liftable() {
        let t = build_basic(&load("transitivity").unwrap()).unwrap();
        let a = analyze(&t);
        assert!(!a.liftable);
        assert!(a.offending.iter().any(|o| o.entry.contains("Friends")), "{:?}", a.offending);
    }

    #[test]
    fn corpus_trees_other_than_transitivity_are_liftable() {
        for (name, _) in crate::corpus::MODELS {
            if *name == "transitivity" {
                continue;
            }
            let a = analyze(&build_basic(&load(name).unwrap()).unwrap());
            assert!(a.liftable, "{name}: {:?}", a.offending);
        }
    }

    #[test]
    fn drinkers_root_counts_popularity() {
        let t = build_basic(&load("drinkers").unwrap()).unwrap();
        let a = analyze(&t);
        assert_eq!(a.cluster_labels(t.root), vec!["#_Y[Popular(Y)]"]);
    }
}
