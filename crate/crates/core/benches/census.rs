use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use dpc_core::census::{run_census, CensusOptions, Executor, SearchSpace};
use dpc_core::families::{builtin, reduced_family, CountMode};
use dpc_core::gf::Field;

fn spaces() -> Vec<(&'static str, SearchSpace, CountMode)> {
    let f3 = Field::parse("3").unwrap();
    let f2 = Field::parse("2").unwrap();
    vec![
        (
            "dp2_classic_f3_reduced",
            SearchSpace::new(reduced_family(&builtin("DP2_CLASSIC").unwrap(), &f3), f3),
            CountMode::Projective,
        ),
        ("dp1_char2_f2", SearchSpace::new(builtin("DP1_CHAR2").unwrap(), f2), CountMode::Affine),
    ]
}

fn census(c: &mut Criterion) {
    let workers = Executor::available().max(2);
    let mut group = c.benchmark_group("census");
    group.sample_size(10);
    for (name, space, mode) in spaces() {
        group.throughput(Throughput::Elements(space.size() as u64));
        for (label, executor) in [("sequential", Executor::Sequential), ("parallel", Executor::Parallel(workers))] {
            let opts = CensusOptions { mode, executor, ..Default::default() };
            group.bench_with_input(BenchmarkId::new(label, name), &space, |b, s| {
                b.iter(|| run_census(s, &opts).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, census);
criterion_main!(benches);
