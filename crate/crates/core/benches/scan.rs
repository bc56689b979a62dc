use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use skinheom::bath::DensityKind;
use skinheom::scan::{run_scan_with, BathParams, Execution, Method, ScanPlan, SchemeChoice, Truncation};
use std::hint::black_box;

fn plan() -> ScanPlan {
    let bath = BathParams {
        kind: DensityKind::DrudeLorentz,
        width: 1.0,
        center: None,
        temperature: 1.44,
        scheme: SchemeChoice::Pade,
    };
    let mut p = ScanPlan::new(vec![Method::Heom, Method::Bmme], (2..=5).collect(), vec![0.1, 0.5], bath);
    p.truncations = vec![Truncation { m_max: 2, l_max: 2 }];
    p
}

fn scans(c: &mut Criterion) {
    let p = plan();
    let mut group = c.benchmark_group("scan");
    group.sample_size(10);
    for (name, exec) in [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)] {
        group.bench_with_input(BenchmarkId::new(name, p.cells().len()), &exec, |b, &exec| {
            b.iter(|| run_scan_with(black_box(&p), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, scans);
criterion_main!(benches);
