use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::symbolic::image_set;
use super::{ground_tree, FoDtree, FoProps};
use crate::model::GroundVar;
use crate::propositional::dtree_properties;

/// A property of an FO node whose image under some grounding differs from the
/// property computed on the ground dtree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mismatch {
    pub fo_node: usize,
    pub ground_node: usize,
    pub property: String,
    pub symbolic: Vec<String>,
    pub ground: Vec<String>,
}

/// Compare every ground node's rv, cutset, context and cluster with the image of the
/// corresponding FO node's symbolic property.
pub fn check_agreement(t: &FoDtree, props: &FoProps) -> Vec<Mismatch> {
    let g = ground_tree(t);
    let gp = dtree_properties(&g.dtree, &g.model.factors);
    let objects: BTreeMap<String, Vec<String>> =
        t.model.domains.iter().map(|d| (d.name.clone(), d.objects.clone())).collect();
    let named =
        |ids: &BTreeSet<usize>| -> BTreeSet<GroundVar> { ids.iter().map(|&i| g.model.vars[i].clone()).collect() };
    let mut out = Vec::new();
    for gn in g.dtree.preorder() {
        let (fo, sigma) = &g.origin[gn];
        let checks = [
            ("rv", &props.rv[*fo], &gp.rv[gn]),
            ("cutset", &props.cutset[*fo], &gp.cutset[gn]),
            ("context", &props.context[*fo], &gp.context[gn]),
            ("cluster", &props.cluster[*fo], &gp.cluster[gn]),
        ];
        for (name, sym, ground) in checks {
            let expected = image_set(sym, sigma, &objects);
            let got = named(ground);
            if expected != got {
                out.push(Mismatch {
                    fo_node: *fo,
                    ground_node: gn,
                    property: name.to_string(),
                    symbolic: expected.iter().map(ToString::to_string).collect(),
                    ground: got.iter().map(ToString::to_string).collect(),
                });
            }
        }
    }
    out
}
