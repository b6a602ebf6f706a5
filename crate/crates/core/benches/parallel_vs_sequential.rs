use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use eulerkit::euler::{circular_axiom_check, ddagger_levels, distribution_suite, epsilon_system, phi_distribution};
use eulerkit::par::Exec;

fn modes() -> Vec<(&'static str, Exec)> {
    let mut v = vec![("sequential", Exec::Sequential)];
    if cfg!(feature = "parallel") {
        v.push(("parallel", Exec::Parallel));
    }
    v
}

fn distribution_relations(c: &mut Criterion) {
    let sys = epsilon_system(&ddagger_levels(30)).unwrap();
    let mut g = c.benchmark_group("distribution_suite");
    g.sample_size(10);
    for (name, exec) in modes() {
        g.bench_with_input(BenchmarkId::new(name, 30), &exec, |b, &exec| b.iter(|| distribution_suite(&sys, 30, exec).unwrap()));
    }
    g.finish();
}

fn circular_axioms(c: &mut Criterion) {
    let levels: Vec<u64> = (2..=40).collect();
    let f = phi_distribution(&levels).unwrap();
    let mut g = c.benchmark_group("circular_axiom_check");
    g.sample_size(10);
    for (name, exec) in modes() {
        g.bench_with_input(BenchmarkId::new(name, 40), &exec, |b, &exec| b.iter(|| circular_axiom_check(&f, exec).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, distribution_relations, circular_axioms);
criterion_main!(benches);
