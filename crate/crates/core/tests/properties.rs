mod common;

use common::*;
use fodtree::analysis::analyze;
use fodtree::build::{build_basic, build_greedy, score};
use fodtree::combinat::k_subsets;
use fodtree::corpus::{load, MODELS};
use fodtree::fotree::validate;
use fodtree::lve::{count_convert, Ext};
use fodtree::model::{
    dpg, ground, normalize, Atom, Constraint, Domain, GroundModel, Model, Parfactor, PredDecl, Substitution, Term,
};
use fodtree::propositional::Factor;
use proptest::prelude::*;
use proptest::test_runner::{RngSeed, TestCaseError};

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 100,
        rng_seed: RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn ok(c: Check) -> Result<(), TestCaseError> {
    c.map_err(TestCaseError::fail)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn writer_output_parses_back(seed in any::<u64>()) {
        ok(check_round_trip(&random_model(seed)))?;
    }

    #[test]
    fn normalize_keeps_the_partition_function(seed in any::<u64>()) {
        let m = random_model(seed);
        let z = brute(&m);
        prop_assert!(close(brute(&normalize(&m).unwrap()), z, 1e-9));
    }

    #[test]
    fn built_trees_validate_and_ground_to_the_model(seed in any::<u64>()) {
        ok(check_built_tree(&random_model(seed)))?;
    }

    #[test]
    fn lifted_matches_brute_force(seed in any::<u64>()) {
        let m = random_model(seed);
        if let Some((_, run)) = lifted(&m) {
            prop_assert!(close(run.z, brute(&m), 1e-9), "lifted {} brute {}", run.z, brute(&m));
        }
    }

    #[test]
    fn object_order_changes_nothing(seed in any::<u64>()) {
        ok(check_exchangeable(&random_model(seed)))?;
    }

    #[test]
    fn plans_are_complete_and_ordered(seed in any::<u64>()) {
        ok(check_plan(&random_model(seed)))?;
    }

    #[test]
    fn corpus_with_random_tables(i in 0..MODELS.len(), seed in any::<u64>(), n in 2usize..5) {
        let (name, _) = MODELS[i];
        let Some(m) = load(name).unwrap().resized(n) else { return Ok(()) };
        let m = retabled(&m, seed);
        ok(check_round_trip(&m))?;
        ok(check_built_tree(&m))?;
        ok(check_exchangeable(&m))?;
        ok(check_plan(&m))?;
        if ground(&m).cards.len() <= CAP {
            if let Some((_, run)) = lifted(&m) {
                prop_assert!(close(run.z, brute(&m), 1e-9), "{} n={}: lifted {} brute {}", name, n, run.z, brute(&m));
            }
        }
    }

    #[test]
    fn liftability_ignores_domain_size(seed in any::<u64>(), n in 2usize..7) {
        let m = random_model(seed);
        let before = analyze(&build_basic(&m).unwrap()).liftable;
        let after = analyze(&build_basic(&m.resized(n).unwrap()).unwrap()).liftable;
        prop_assert_eq!(before, after);
    }

    #[test]
    fn greedy_is_never_worse(seed in any::<u64>()) {
        let m = random_model(seed);
        let (t, _) = build_greedy(&m).unwrap();
        prop_assert!(score(&t) <= score(&build_basic(&m).unwrap()));
        prop_assert!(validate(&t).is_empty());
    }

    #[test]
    fn dpg_groups_partition_the_grounding(seed in any::<u64>()) {
        let mut m = random_model(seed);
        // every parfactor must mention X
        let x = Term::var("X", "Person");
        m.parfactors.retain(|pf| pf.atoms.iter().any(|a| a.mentions(&x)));
        prop_assume!(!m.parfactors.is_empty());
        let r = dpg(&m, std::slice::from_ref(&x)).unwrap();
        let objects = &m.domains[0].objects;
        let mut parts = GroundModel::new();
        let mut ids = Vec::new();
        let groups = k_subsets(objects.len(), 1);
        prop_assert_eq!(r.group_count.clone(), (groups.len() as u32).into());
        for subset in groups {
            let mut sigma = Substitution::new();
            for (rep, &o) in r.reps.iter().zip(&subset) {
                sigma.insert(rep.clone(), Term::obj(objects[o].clone(), "Person"));
            }
            let mut block = m.clone();
            block.parfactors = r.group_blocks().concat().iter().map(|pf| pf.substitute(&sigma).unwrap()).collect();
            let g = ground(&block);
            for f in &g.factors {
                let vars = f.vars.iter().map(|&v| parts.intern(g.vars[v].clone(), g.cards[v])).collect();
                parts.factors.push(Factor::new(vars, f.cards.clone(), f.table.clone()));
                ids.push(parts.factors.len() - 1);
            }
        }
        prop_assert_eq!(factor_multiset(&parts, &ids), all_factors(&ground(&m)));
    }

    #[test]
    fn count_conversion_expands_to_the_grounding(table in prop::collection::vec(0.1f64..10.0, 4), n in 2usize..6) {
        let (x, y) = (Term::var("X", "P"), Term::var("Y", "P"));
        let mut c = Constraint::new();
        c.insert(x.clone(), y.clone());
        let m = Model {
            domains: vec![Domain::numbered("P", n)],
            preds: vec![PredDecl::boolean("S", vec!["P".into()])],
            parfactors: vec![Parfactor { atoms: vec![Atom::new("S", vec![x]), Atom::new("S", vec![y])], constraint: c, table }],
        };
        let conv = count_convert(&m.parfactors[0], &m).unwrap();
        prop_assert!(close(conv.partition(&m), brute(&m), 1e-12));
    }

    #[test]
    fn extended_floats_agree_with_f64(a in 1e-3f64..1e3, b in 1e-3f64..1e3, k in 0u64..40) {
        prop_assert_eq!((Ext::new(a) * Ext::new(b)).to_f64(), a * b);
        prop_assert_eq!((Ext::new(a) + Ext::new(b)).to_f64(), a + b);
        prop_assert!(close(Ext::new(a).powu(k).to_f64(), a.powi(k as i32), 1e-12));
    }
}
