use std::hint::black_box;

use bchdtp::code::CodeSpec;
use bchdtp::par::Exec;
use bchdtp::sim::{simulate_frames, DecoderKind, SimConfig};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

fn frames(c: &mut Criterion) {
    let spec = CodeSpec::new(255, 239, 5).unwrap();
    let n = 20_000;
    let mut g = c.benchmark_group("simulate_255");
    g.sample_size(10);
    g.throughput(Throughput::Elements(n));
    for (dec, t, ta) in [
        (DecoderKind::Bdd, 0.0, None),
        (DecoderKind::EaedA, 0.13, Some(0.75)),
    ] {
        for (name, exec) in [
            ("sequential", Exec::Sequential),
            ("parallel", Exec::Parallel),
        ] {
            let mut cfg = SimConfig::new(spec, dec, 5.0, n, 1).thresholds(t, ta);
            cfg.exec = exec;
            g.bench_function(BenchmarkId::new(name, dec), |b| {
                b.iter(|| black_box(simulate_frames(&cfg).unwrap()))
            });
        }
    }
    g.finish();
}

criterion_group!(benches, frames);
criterion_main!(benches);
