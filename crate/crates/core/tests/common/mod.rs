#![allow(dead_code)]

use std::collections::BTreeSet;

use fodtree::analysis::{analyze, extract_plan, LiftedOp, OpKind};
use fodtree::build::build_basic;
use fodtree::fotree::{check_agreement, compute_properties, ground_tree, validate, FoDtree};
use fodtree::io::{parse_model, write_model};
use fodtree::lve::{execute_plan, Execution};
use fodtree::model::{ground, Atom, Constraint, Domain, GroundModel, Model, Parfactor, PredDecl, Term};
use fodtree::propositional::brute_force_z;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CAP: usize = 20;

/// One domain, up to three predicates, one to three parfactors over `X` and `Y`.
pub fn random_model(seed: u64) -> Model {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let person = "Person".to_string();
    let mut preds = vec![PredDecl::boolean("Smokes", vec![person.clone()])];
    if rng.gen_bool(0.5) {
        preds.push(PredDecl::boolean("Cancer", vec![person.clone()]));
    }
    if rng.gen_bool(0.6) {
        preds.push(PredDecl::boolean("Friends", vec![person.clone(), person.clone()]));
    }
    let x = Term::var("X", person.clone());
    let y = Term::var("Y", person.clone());
    let mut parfactors = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let mut atoms: Vec<Atom> = Vec::new();
        for _ in 0..rng.gen_range(1..=3) {
            let p = preds.choose(&mut rng).unwrap();
            let args = match (p.args.len(), rng.gen_range(0..2)) {
                (2, 0) => vec![x.clone(), y.clone()],
                (2, _) => vec![y.clone(), x.clone()],
                (_, 0) => vec![x.clone()],
                _ => vec![y.clone()],
            };
            let a = Atom::new(p.name.clone(), args);
            if !atoms.contains(&a) {
                atoms.push(a);
            }
        }
        let mut constraint = Constraint::new();
        if atoms.iter().any(|a| a.mentions(&x)) && atoms.iter().any(|a| a.mentions(&y)) {
            constraint.insert(x.clone(), y.clone());
        }
        parfactors.push(Parfactor { table: random_table(&mut rng, atoms.len()), atoms, constraint });
    }
    Model { domains: vec![Domain::numbered(person, rng.gen_range(2..=4))], preds, parfactors }
}

fn random_table(rng: &mut ChaCha8Rng, atoms: usize) -> Vec<f64> {
    (0..1usize << atoms).map(|_| (rng.gen_range(0.1..10.0f64) * 100.0).round() / 100.0).collect()
}

/// A corpus model with every table redrawn from `seed`.
pub fn retabled(m: &Model, seed: u64) -> Model {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = m.clone();
    for pf in &mut m.parfactors {
        let len = pf.table.len();
        pf.table = (0..len).map(|_| (rng.gen_range(0.1..10.0f64) * 100.0).round() / 100.0).collect();
    }
    m
}

pub fn brute(m: &Model) -> f64 {
    let g = ground(m);
    brute_force_z(&g.factors, &g.cards, CAP).unwrap()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(f64::MIN_POSITIVE)
}

/// Build, analyze and run; `None` when the tree is not liftable.
pub fn lifted(m: &Model) -> Option<(FoDtree, Execution)> {
    let t = build_basic(m).unwrap();
    let a = analyze(&t);
    let plan = extract_plan(&t, &a).ok()?;
    let run = execute_plan(&t, &a, &plan).unwrap();
    Some((t, run))
}

/// Factors as (randvars, table bits), sorted; independent of interning order.
pub fn factor_multiset(g: &GroundModel, ids: &[usize]) -> Vec<(Vec<String>, Vec<u64>)> {
    let mut out: Vec<_> = ids
        .iter()
        .map(|&f| {
            let f = &g.factors[f];
            (f.vars.iter().map(|&v| g.vars[v].to_string()).collect(), f.table.iter().map(|x| x.to_bits()).collect())
        })
        .collect();
    out.sort();
    out
}

pub fn all_factors(g: &GroundModel) -> Vec<(Vec<String>, Vec<u64>)> {
    factor_multiset(g, &(0..g.factors.len()).collect::<Vec<_>>())
}

fn ancestors(t: &FoDtree, n: usize) -> BTreeSet<usize> {
    let parents = t.parents();
    let mut out = BTreeSet::new();
    let mut cur = parents[n];
    while let Some(p) = cur {
        out.insert(p);
        cur = parents[p];
    }
    out
}

fn is_group_op(op: &LiftedOp) -> bool {
    matches!(op.kind, OpKind::Agg { .. } | OpKind::Count { .. })
}

pub type Check = Result<(), String>;

pub fn check_round_trip(m: &Model) -> Check {
    let back = parse_model(&write_model(m)).map_err(|e| e.to_string())?;
    if back != *m {
        return Err("parsed model differs from the original".into());
    }
    Ok(())
}

pub fn check_built_tree(m: &Model) -> Check {
    let t = build_basic(m).map_err(|e| e.to_string())?;
    if let Some(v) = validate(&t).first() {
        return Err(format!("{v:?}"));
    }
    if let Some(x) = check_agreement(&t, &compute_properties(&t)).first() {
        return Err(format!("{x:?}"));
    }
    let g = ground_tree(&t);
    if factor_multiset(&g.model, &g.dtree.leaf_factors()) != all_factors(&ground(&t.model)) {
        return Err("grounded leaves differ from the grounded model".into());
    }
    Ok(())
}

pub fn check_exchangeable(m: &Model) -> Check {
    let mut shuffled = m.clone();
    for d in &mut shuffled.domains {
        d.objects.reverse();
    }
    match (lifted(m), lifted(&shuffled)) {
        (Some((_, a)), Some((_, b))) => {
            if !close(a.z, b.z, 1e-12) || a.work != b.work {
                return Err(format!("Z {} vs {}, work {} vs {}", a.z, b.z, a.work, b.work));
            }
            Ok(())
        }
        (None, None) => Ok(()),
        _ => Err("liftability depends on object order".into()),
    }
}

/// Every cluster entry outside its context is eliminated exactly once, descendants
/// go first, group ops lead at each node, and hoisting an ancestor's op is rejected.
pub fn check_plan(m: &Model) -> Check {
    let t = build_basic(m).map_err(|e| e.to_string())?;
    let a = analyze(&t);
    let Ok(plan) = extract_plan(&t, &a) else { return Ok(()) };
    let mut want = Vec::new();
    for n in t.preorder() {
        for e in &a.cluster[n] {
            if !a.context[n].contains(e) {
                want.push((n, format!("{e:?}")));
            }
        }
    }
    let mut got: Vec<(usize, String)> = plan
        .iter()
        .filter_map(|op| match &op.kind {
            OpKind::Elim { target } => Some((op.node, format!("{target:?}"))),
            _ => None,
        })
        .collect();
    want.sort();
    got.sort();
    if got != want {
        return Err(format!("eliminated {got:?}, expected {want:?}"));
    }
    for (i, op) in plan.iter().enumerate() {
        for later in &plan[i + 1..] {
            if ancestors(&t, later.node).contains(&op.node) {
                return Err(format!("{} runs after its ancestor's {}", later.label, op.label));
            }
            if later.node == op.node && is_group_op(later) && !is_group_op(op) {
                return Err(format!("{} follows an elimination at its node", later.label));
            }
        }
    }
    let hoist =
        (0..plan.len()).rev().find(|&j| plan[..j].iter().any(|o| ancestors(&t, o.node).contains(&plan[j].node)));
    if let Some(j) = hoist {
        let mut bad = plan.clone();
        let op = bad.remove(j);
        bad.insert(0, op);
        if execute_plan(&t, &a, &bad).is_ok() {
            return Err("a reordered plan was accepted".into());
        }
    }
    Ok(())
}
