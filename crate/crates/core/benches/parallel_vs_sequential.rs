use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nilrec::ergodic_avg::AverageFactor;
use nilrec::reclab::rotation_skew_config;
use nilrec::*;

fn registry() -> GeneratorRegistry {
    GeneratorRegistry::default().with("alpha", "sqrt(2)-1").unwrap().with("beta", "sqrt(3)-1").unwrap()
}

fn averages(c: &mut Criterion) {
    let reg = registry();
    let cfg = rotation_skew_config().unwrap();
    let factors: Vec<AverageFactor> = cfg
        .systems
        .iter()
        .zip(&cfg.polys)
        .map(|(s, p)| AverageFactor::new(s.clone(), Point::origin(2), p.clone()))
        .collect();
    let obs: Vec<Observable> = vec![TrigPoly::character(1, 0, vec![1, 0]).into(), TrigPoly::character(1, 0, vec![0, 1]).into()];
    let bx = FolnerBox::new(4000, BoxRule::Fixed { b: 64 }, 2);
    let mut g = c.benchmark_group("multiple_average");
    for exec in [Exec::Sequential, Exec::Parallel] {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| multiple_average(&factors, &obs, &bx, &reg, exec).unwrap())
        });
    }
    g.finish();
}

fn scans(c: &mut Criterion) {
    let reg = registry();
    let cfg = rotation_skew_config().unwrap().with_schedule(vec![250, 500]);
    let mut g = c.benchmark_group("recurrence_scan");
    g.sample_size(10);
    for exec in [Exec::Sequential, Exec::Parallel] {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| recurrence_scan(&cfg, &reg, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, averages, scans);
criterion_main!(benches);
