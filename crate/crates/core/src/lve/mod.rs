//! Lifted variable elimination over a counted FO-dtree.

mod convert;
mod dpg;
mod exec;
mod factor;
mod hist;
mod num;

pub use convert::{count_convert, CountConversion};
pub use dpg::{dpg_product, group_count};
pub use exec::{execute_plan, execute_plan_with, ExecOptions, Execution, OpRecord};
pub use factor::{Engine, IndexMap, LiftedFactor};
pub use hist::{marginal, marginal_map, state_projection, HistSpace, Spaces};
pub use num::Ext;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{analyze, extract_plan};
    use crate::build::build_basic;
    use crate::corpus::{load, MODELS};
    use crate::model::ground;
    use crate::propositional::brute_force_z;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * b.abs().max(1e-300)
    }

    #[test]
    fn corpus_matches_brute_force() {
        for (name, _) in MODELS {
            if *name == "transitivity" {
                continue;
            }
            for n in 2..=4 {
                let Some(m) = load(name).unwrap().resized(n) else { continue };
                let g = ground(&m);
                if g.cards.len() > 20 {
                    continue;
                }
                let t = build_basic(&m).unwrap();
                let a = analyze(&t);
                let plan = extract_plan(&t, &a).unwrap();
                let run = execute_plan(&t, &a, &plan).unwrap_or_else(|e| panic!("{name} n={n}: {e}"));
                let z = brute_force_z(&g.factors, &g.cards, 20).unwrap();
                assert!(close(run.z, z), "{name} n={n}: lifted {} brute {z}", run.z);
            }
        }
    }

    #[test]
    fn work_within_bounds() {
        use crate::analysis::estimate_cost;
        use crate::fotree::ground_tree;
        use crate::propositional::{dtree_properties, ve_over_dtree};
        for (name, _) in MODELS {
            if *name == "transitivity" {
                continue;
            }
            for n in 2..=5 {
                let Some(m) = load(name).unwrap().resized(n) else { continue };
                let t = build_basic(&m).unwrap();
                let a = analyze(&t);
                let cost = estimate_cost(&t, &a);
                let run = execute_plan(&t, &a, &extract_plan(&t, &a).unwrap()).unwrap();
                let g = ground_tree(&t);
                let gp = dtree_properties(&g.dtree, &g.model.factors);
                let (_, gw) = ve_over_dtree(&g.dtree, &gp, &g.model.factors).unwrap();
                assert!(
                    num_bigint::BigUint::from(run.work) <= cost.lifted_bound,
                    "{name} n={n}: lifted work {}",
                    run.work
                );
                assert!(num_bigint::BigUint::from(gw.0) <= cost.ground_bound, "{name} n={n}: ground work {}", gw.0);
            }
        }
    }
}
