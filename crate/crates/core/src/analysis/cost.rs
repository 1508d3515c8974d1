use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{Analysis, Axis};
use crate::combinat::{binomial, ceil_log2};
use crate::fotree::{FoDtree, FoNodeKind};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftedWidth {
    /// Most atom axes in one counted cluster.
    pub w_g: usize,
    /// Most counting axes in one counted cluster.
    pub w_count: usize,
    pub ground_witnesses: Vec<usize>,
    pub count_witnesses: Vec<usize>,
}

pub fn lifted_width(t: &FoDtree, a: &Analysis) -> LiftedWidth {
    let nodes = t.preorder();
    let atoms = |n: usize| a.cluster[n].iter().filter(|x| matches!(x, Axis::Atom(_))).count();
    let counts = |n: usize| a.cluster[n].len() - atoms(n);
    let w_g = nodes.iter().map(|&n| atoms(n)).max().unwrap_or(0);
    let w_count = nodes.iter().map(|&n| counts(n)).max().unwrap_or(0);
    LiftedWidth {
        w_g,
        w_count,
        ground_witnesses: nodes.iter().copied().filter(|&n| w_g > 0 && atoms(n) == w_g).collect(),
        count_witnesses: nodes.iter().copied().filter(|&n| w_count > 0 && counts(n) == w_count).collect(),
    }
}

mod big_string {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramRange {
    pub node: usize,
    pub var: String,
    pub n: usize,
    pub r: usize,
    #[serde(with = "big_string")]
    pub histograms: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostEstimate {
    pub n_tree: usize,
    #[serde(with = "big_string")]
    pub n_ground: BigUint,
    /// Largest domain.
    pub n: usize,
    /// Largest counting randvar population.
    pub n_count: usize,
    /// Largest joint pattern range of a counting randvar.
    pub r_count: usize,
    pub width: LiftedWidth,
    /// Largest product of atom-axis ranges in one cluster (`2^w_g` when boolean).
    pub ground_entries: usize,
    #[serde(with = "big_string")]
    pub lifted_bound: BigUint,
    #[serde(with = "big_string")]
    pub ground_bound: BigUint,
    pub histograms: Vec<HistogramRange>,
}

/// Nodes of the grounded tree, without building it.
pub fn ground_node_count(t: &FoDtree) -> BigUint {
    fn go(t: &FoDtree, n: usize) -> BigUint {
        let node = &t.nodes[n];
        match &node.kind {
            FoNodeKind::Leaf(_) => BigUint::one(),
            FoNodeKind::Internal => node.children.iter().map(|&c| go(t, c)).sum::<BigUint>() + 1u32,
            FoNodeKind::Dpg(d) => {
                let avail = t.model.domain_size(d.domain()).saturating_sub(d.excluded.len());
                binomial(avail, d.k()) * go(t, node.children[0]) + 1u32
            }
        }
    }
    go(t, t.root)
}

/// Bounds on work: lifted `n_T · ⌈log2 n⌉ · 2^w_g · n_#^(w_#·r_#)` and ground
/// `n_G · 2^w_g · r_#^(n_#·w_#)`, with `2^w_g` read as the true product of atom
/// ranges and `r_#` the joint range of the counted patterns (2 for one boolean pattern).
pub fn estimate_cost(t: &FoDtree, a: &Analysis) -> CostEstimate {
    let width = lifted_width(t, a);
    let nodes = t.preorder();
    let n = t.model.domains.iter().map(|d| d.size()).max().unwrap_or(0);
    let mut n_count = 0;
    let mut r_count = 0;
    let mut ground_entries = 1;
    let mut histograms = Vec::new();
    for &v in &nodes {
        let mut entries = 1usize;
        for x in &a.cluster[v] {
            match x {
                Axis::Atom(atom) => entries = entries.saturating_mul(t.model.range_size(&atom.pred)),
                Axis::Count(c) => {
                    let r = c.joint_range(&t.model);
                    n_count = n_count.max(c.size);
                    r_count = r_count.max(r);
                    histograms.push(HistogramRange {
                        node: v,
                        var: a.namer.count(c),
                        n: c.size,
                        r,
                        histograms: binomial(c.size + r - 1, r - 1),
                    });
                }
            }
        }
        ground_entries = ground_entries.max(entries);
    }
    let n_tree = nodes.len();
    let n_ground = ground_node_count(t);
    let count_exp = (width.w_count * r_count) as u32;
    let lifted_bound = BigUint::from(n_tree)
        * BigUint::from(ceil_log2(n))
        * BigUint::from(ground_entries)
        * BigUint::from(n_count).pow(count_exp);
    let ground_bound = if width.w_count == 0 || r_count == 0 {
        &n_ground * BigUint::from(ground_entries)
    } else {
        &n_ground * BigUint::from(ground_entries) * BigUint::from(r_count).pow((n_count * width.w_count) as u32)
    };
    CostEstimate {
        n_tree,
        n_ground,
        n,
        n_count,
        r_count,
        width,
        ground_entries,
        lifted_bound,
        ground_bound,
        histograms,
    }
}
