//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

mod common;

use std::time::{Duration, Instant};

use common::*;
use fodtree::analysis::{analyze, estimate_cost, extract_plan, OpKind};
use fodtree::build::build_basic;
use fodtree::corpus::{load, source, MODELS};
use fodtree::fotree::{check_agreement, compute_properties, ground_tree, FoNodeKind};
use fodtree::io::parse_model;
use fodtree::lve::{count_convert, execute_plan, group_count};
use fodtree::model::{ground, Model};
use fodtree::propositional::{dtree_properties, ve_over_dtree};
use num_bigint::BigUint;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sized(name: &str, n: usize) -> Option<Model> {
    load(name).unwrap().resized(n)
}

fn mutual_friendship() -> Outcome {
    let start = Instant::now();
    let m = sized("friendship", 4).unwrap();
    let t = build_basic(&m).unwrap();
    let a = analyze(&t);
    let plan = extract_plan(&t, &a).map_err(|e| e.to_string())?;
    let dpgs: Vec<usize> =
        t.preorder().into_iter().filter(|&n| matches!(t.nodes[n].kind, FoNodeKind::Dpg(_))).collect();
    ensure(dpgs.len() == 1, || format!("{} DPG nodes", dpgs.len()))?;
    let d = t.dpg(dpgs[0]).unwrap();
    let groups = group_count(d, &t.model);
    ensure(groups == BigUint::from(6u32), || format!("{groups} groups"))?;

    let tx = t.nodes[dpgs[0]].children[0];
    let (last, elims) = plan.split_last().unwrap();
    ensure(elims.iter().all(|o| matches!(o.kind, OpKind::Elim { .. }) && o.node == tx), || {
        "eliminations outside T_x".into()
    })?;
    let agg = match &last.kind {
        OpKind::Agg { logvars } => logvars.iter().map(|v| v.name().to_string()).collect::<Vec<_>>(),
        _ => Vec::new(),
    };
    ensure(agg == ["X", "Y"], || format!("last op {}", last.label))?;

    // one group: Friends(a,b) and Friends(b,a) summed over both values
    let phi = &m.parfactors[0].table;
    let c: f64 = (0..2).flat_map(|u| (0..2).map(move |v| (u, v))).map(|(u, v)| phi[u * 2 + v] * phi[v * 2 + u]).sum();
    let run = execute_plan(&t, &a, &plan).map_err(|e| e.to_string())?;
    let oracle = brute(&m);
    ensure(close(run.z, c.powi(6), 1e-9), || format!("Z {} vs c^6 {}", run.z, c.powi(6)))?;
    ensure(close(run.z, oracle, 1e-9), || format!("Z {} vs brute force {oracle}", run.z))?;

    let mut uniform = m.clone();
    uniform.parfactors[0].table = vec![1.0; 4];
    let (_, u) = lifted(&uniform).unwrap();
    ensure(u.z == 4096.0, || format!("uniform Z {}", u.z))?;
    let took = start.elapsed();
    ensure(took < Duration::from_secs(1), || format!("took {took:?}"))?;
    Ok(format!("6 groups, plan {}, Z = c^6 = {:.6e}, uniform Z = {}, {took:.2?}", labels(&plan), run.z, u.z))
}

fn labels(plan: &[fodtree::analysis::LiftedOp]) -> String {
    plan.iter().map(|o| o.label.as_str()).collect::<Vec<_>>().join(" ≺ ")
}

fn pairwise_counting() -> Outcome {
    let start = Instant::now();
    for n in 2..=5 {
        let m = sized("smokers_pairwise", n).unwrap();
        let (_, run) = lifted(&m).ok_or("not liftable")?;
        let oracle = brute(&m);
        ensure(close(run.z, oracle, 1e-9), || format!("n={n}: Z {} vs brute force {oracle}", run.z))?;
        let conv = count_convert(&m.parfactors[0], &m).map_err(|e| e.to_string())?;
        for (h, exps) in conv.hists.iter().zip(&conv.exponents) {
            // state 0 is true, state 1 is false
            let (t, f) = (h[0] as u64, h[1] as u64);
            let want: Vec<BigUint> =
                [t * t.saturating_sub(1), t * f, f * t, f * f.saturating_sub(1)].map(BigUint::from).to_vec();
            ensure(*exps == want, || format!("n={n} h={h:?}: exponents {exps:?}"))?;
        }
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(1), || format!("took {took:?}"))?;
    Ok(format!("|D| 2..5 match brute force, exponents n_t(n_t-1), n_t n_f, n_f n_t, n_f(n_f-1), {took:.2?}"))
}

fn drinkers_plan() -> Outcome {
    let src = source("drinkers").unwrap().replace("Likes", "F").replace("Smokes", "S").replace("Popular", "D");
    let m = parse_model(&src).map_err(|e| e.to_string())?;
    let t = build_basic(&m).unwrap();
    let plan = extract_plan(&t, &analyze(&t)).map_err(|e| e.to_string())?;
    let got = labels(&plan);
    let want = "ΣF(X,Y) ≺ #_Y ≺ ΣS(X) ≺ AGG(X) ≺ Σ#_Y[D(Y)]";
    ensure(got == want, || format!("plan {got}"))?;
    Ok(got)
}

fn agreement() -> Outcome {
    let mut checked = 0;
    for (name, _) in MODELS {
        for n in 2..=5 {
            let Some(m) = sized(name, n) else { continue };
            let t = build_basic(&m).unwrap();
            let bad = check_agreement(&t, &compute_properties(&t));
            ensure(bad.is_empty(), || format!("{name} n={n}: {:?}", bad[0]))?;
            checked += 1;
        }
    }
    ensure(MODELS.len() >= 6, || "corpus too small".into())?;
    Ok(format!("{} models, {checked} trees agree node for node", MODELS.len()))
}

fn liftability() -> Outcome {
    for (name, _) in MODELS {
        let t = build_basic(&load(name).unwrap()).unwrap();
        let a = analyze(&t);
        if *name == "transitivity" {
            ensure(!a.liftable, || "transitivity reported liftable".into())?;
            let o = a.offending.first().ok_or("no offending entry named")?;
            let vars = ["X", "Y", "Z"].iter().filter(|v| o.entry.contains(*v)).count();
            ensure(vars == 2, || format!("offending entry {}", o.entry))?;
        } else {
            ensure(a.liftable, || format!("{name} reported not liftable"))?;
        }
    }
    let t = build_basic(&load("transitivity").unwrap()).unwrap();
    let o = &analyze(&t).offending[0];
    Ok(format!("{} liftable, transitivity rejected at node {}: {}", MODELS.len() - 1, o.node, o.entry))
}

fn bounds() -> Outcome {
    let mut checked = 0;
    for (name, _) in MODELS {
        for n in 2..=5 {
            let Some(m) = sized(name, n) else { continue };
            let t = build_basic(&m).unwrap();
            let a = analyze(&t);
            let Ok(plan) = extract_plan(&t, &a) else { continue };
            let cost = estimate_cost(&t, &a);
            let run = execute_plan(&t, &a, &plan).map_err(|e| e.to_string())?;
            let g = ground_tree(&t);
            let props = dtree_properties(&g.dtree, &g.model.factors);
            let (_, ground_work) = ve_over_dtree(&g.dtree, &props, &g.model.factors).map_err(|e| e.to_string())?;
            ensure(BigUint::from(run.work) <= cost.lifted_bound, || {
                format!("{name} n={n}: lifted work {} > {}", run.work, cost.lifted_bound)
            })?;
            ensure(BigUint::from(ground_work.0) <= cost.ground_bound, || {
                format!("{name} n={n}: ground work {} > {}", ground_work.0, cost.ground_bound)
            })?;
            checked += 1;
        }
    }
    let mut work = Vec::new();
    let mut limit = 0.0;
    for n in [8, 16, 32] {
        let m = sized("smokers_pairwise", n).unwrap();
        let (t, run) = lifted(&m).ok_or("not liftable")?;
        let cost = estimate_cost(&t, &analyze(&t));
        limit = 2f64.powi((cost.width.w_count * cost.r_count) as i32) * 2.0;
        work.push(run.work);
    }
    let ratios: Vec<f64> = work.windows(2).map(|w| w[1] as f64 / w[0] as f64).collect();
    ensure(ratios.iter().all(|&r| r <= limit), || format!("work {work:?}, ratios {ratios:?} above {limit}"))?;
    Ok(format!("{checked} trees within both bounds; work at n=8,16,32 {work:?}, ratios {ratios:.2?} <= {limit}"))
}

fn property_suite() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    let mut models: Vec<Model> = (0..100).map(random_model).collect();
    for (i, (name, _)) in MODELS.iter().enumerate() {
        for n in 2..=4 {
            if let Some(m) = sized(name, n) {
                models.push(retabled(&m, (i * 10 + n) as u64));
            }
        }
    }
    for m in &models {
        for check in [check_exchangeable, check_plan, check_round_trip, check_built_tree] {
            check(m).map_err(|e| format!("case {cases}: {e}"))?;
        }
        if ground(m).cards.len() <= CAP {
            if let Some((_, run)) = lifted(m) {
                ensure(close(run.z, brute(m), 1e-9), || format!("case {cases}: lifted {} brute {}", run.z, brute(m)))?;
            }
        }
        cases += 1;
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(60), || format!("took {took:?}"))?;
    Ok(format!("{cases} seeded cases (100 random models plus the corpus with redrawn tables), {took:.2?}"))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("mutual friendship", mutual_friendship),
        ("pairwise counting", pairwise_counting),
        ("drinkers plan", drinkers_plan),
        ("grounding agreement", agreement),
        ("liftability test", liftability),
        ("cost bounds", bounds),
        ("property suite", property_suite),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
