use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use fodtree::analysis::{analyze, extract_plan};
use fodtree::build::build_basic;
use fodtree::corpus::load;
use fodtree::lve::{execute_plan_with, ExecOptions};
use fodtree::model::ground;
use fodtree::propositional::brute_force_z_seq;

fn lifted(c: &mut Criterion) {
    let mut g = c.benchmark_group("lifted");
    g.sample_size(10);
    for n in [128, 512] {
        let m = load("colors").unwrap().resized(n).unwrap();
        let t = build_basic(&m).unwrap();
        let a = analyze(&t);
        let plan = extract_plan(&t, &a).unwrap();
        for parallel in [false, true] {
            let name = if parallel { "parallel" } else { "sequential" };
            g.bench_with_input(BenchmarkId::new(name, n), &parallel, |b, &parallel| {
                b.iter(|| execute_plan_with(&t, &a, &plan, ExecOptions { parallel }).unwrap().z)
            });
        }
    }
    g.finish();
}

fn brute_force(c: &mut Criterion) {
    let m = load("smokers_friends").unwrap().resized(4).unwrap();
    let gm = ground(&m);
    let mut g = c.benchmark_group("brute_force");
    g.sample_size(10);
    g.bench_function("sequential", |b| b.iter(|| brute_force_z_seq(black_box(&gm.factors), &gm.cards, 25).unwrap()));
    #[cfg(feature = "parallel")]
    g.bench_function("parallel", |b| {
        b.iter(|| fodtree::propositional::brute_force_z_par(black_box(&gm.factors), &gm.cards, 25).unwrap())
    });
    g.finish();
}

criterion_group!(benches, lifted, brute_force);
criterion_main!(benches);
