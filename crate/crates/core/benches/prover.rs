use std::hint::black_box;

use avs_core::exec::Exec;
use avs_core::gfun::GSpec;
use avs_core::scheme::{build_help, SchemeConfig, SchemeParams};
use avs_core::stream::{gen_stream, GenKind};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn prover(c: &mut Criterion) {
    let g = GSpec::f0();
    let mut group = c.benchmark_group("build_help");
    group.sample_size(10);
    for n in [4096usize, 32768] {
        let params = SchemeParams::new(&SchemeConfig::emg(n, 1), &g).unwrap();
        let stream = gen_stream(GenKind::UniformInsert, n, n, 7);
        for (name, exec) in [
            ("sequential", Exec::Sequential),
            ("parallel", Exec::Parallel),
        ] {
            group.bench_with_input(BenchmarkId::new(name, n), &stream, |b, s| {
                b.iter(|| build_help(&params, black_box(s), &g, &[], exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, prover);
criterion_main!(benches);
