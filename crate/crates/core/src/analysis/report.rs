use serde::{Deserialize, Serialize};

use super::{estimate_cost, extract_plan, Analysis, CostEstimate, Offending};
use crate::fotree::FoDtree;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeClusters {
    pub node: usize,
    pub label: String,
    pub cluster: Vec<String>,
    pub context: Vec<String>,
}

/// Everything `analyze` prints, in a stable JSON layout.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub liftable: bool,
    pub offending_nodes: Vec<Offending>,
    pub plan: Vec<String>,
    pub w_g: usize,
    #[serde(rename = "w_#")]
    pub w_count: usize,
    pub cost: CostEstimate,
    pub per_node_clusters: Vec<NodeClusters>,
}

pub fn report(t: &FoDtree, a: &Analysis) -> Report {
    let cost = estimate_cost(t, a);
    let plan = extract_plan(t, a).map(|p| p.into_iter().map(|o| o.label).collect()).unwrap_or_default();
    Report {
        liftable: a.liftable,
        offending_nodes: a.offending.clone(),
        plan,
        w_g: cost.width.w_g,
        w_count: cost.width.w_count,
        per_node_clusters: t
            .preorder()
            .into_iter()
            .map(|v| NodeClusters {
                node: v,
                label: t.label(v),
                cluster: a.cluster_labels(v),
                context: a.context_labels(v),
            })
            .collect(),
        cost,
    }
}
