use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use tsl_core::measures::{Carrier, ProbMeasure};
use tsl_core::montecarlo::{ci_coupling, estimate_law, Execution, Observable, SimConfig};
use tsl_core::spec_file::{parse_spec, Problem};

const TYPICAL: &str = "space 3\ngen s1 = 2 1 2\ngen s2 = 3 3 1\nnoise iid s1:1/2 s2:1/2\n";
const Z6: &str = "group Z 6\nnoise iid 0:1/4 1:1/4 3:1/2\n";

fn problem(text: &str) -> Problem {
    parse_spec(text).unwrap().build().unwrap()
}

fn modes() -> [(&'static str, Execution); 2] {
    [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)]
}

fn state_law(c: &mut Criterion) {
    let p = problem(TYPICAL);
    let entry = ProbMeasure::uniform(Carrier::States(3));
    let mut group = c.benchmark_group("state_law_depth64");
    group.sample_size(10);
    for trials in [10_000u64, 100_000] {
        group.throughput(Throughput::Elements(trials));
        for (name, exec) in modes() {
            let cfg = SimConfig::new(64, trials, 42).unwrap().with_execution(exec);
            group.bench_with_input(BenchmarkId::new(name, trials), &cfg, |b, cfg| {
                b.iter(|| estimate_law(&p.noise, &p.action, cfg, &Observable::State(entry.clone())).unwrap())
            });
        }
    }
    group.finish();
}

fn product_law(c: &mut Criterion) {
    let p = problem(Z6);
    let mut group = c.benchmark_group("product_law_z6");
    group.sample_size(10);
    for depth in [8usize, 64, 256] {
        group.throughput(Throughput::Elements(20_000 * depth as u64));
        for (name, exec) in modes() {
            let cfg = SimConfig::new(depth, 20_000, 7).unwrap().with_execution(exec);
            group.bench_with_input(BenchmarkId::new(name, depth), &cfg, |b, cfg| {
                b.iter(|| estimate_law(&p.noise, &p.action, cfg, &Observable::Product).unwrap())
            });
        }
    }
    group.finish();
}

fn coupling(c: &mut Criterion) {
    let p = problem(Z6);
    let u = ProbMeasure::uniform(Carrier::States(6));
    let mut group = c.benchmark_group("coupling_z6_depth64");
    group.sample_size(10);
    for (name, exec) in modes() {
        let cfg = SimConfig::new(64, 20_000, 9).unwrap().with_execution(exec);
        group.bench_function(name, |b| b.iter(|| ci_coupling(&p.noise, &p.action, &u, &u, &cfg).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, state_law, product_law, coupling);
criterion_main!(benches);
