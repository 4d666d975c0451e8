use criterion::{criterion_group, criterion_main, Criterion};
use keplergls::kepler::KeplerParams;
use keplergls::verify::{momentum_intertwine, poisson_table, Execution, VerifyConfig};

fn suites(c: &mut Criterion) {
    let params = KeplerParams::unit();
    let cfg = VerifyConfig { samples: Some(100), ..VerifyConfig::default() };

    let mut g = c.benchmark_group("momentum_intertwine");
    g.bench_function("sequential", |b| {
        b.iter(|| momentum_intertwine(&params, &cfg, Execution::Sequential).unwrap())
    });
    g.bench_function("parallel", |b| {
        b.iter(|| momentum_intertwine(&params, &cfg, Execution::Parallel).unwrap())
    });
    g.finish();

    let mut g = c.benchmark_group("poisson_table");
    g.bench_function("sequential", |b| {
        b.iter(|| poisson_table(&params, &cfg, Execution::Sequential).unwrap())
    });
    g.bench_function("parallel", |b| {
        b.iter(|| poisson_table(&params, &cfg, Execution::Parallel).unwrap())
    });
    g.finish();
}

criterion_group!(benches, suites);
criterion_main!(benches);
