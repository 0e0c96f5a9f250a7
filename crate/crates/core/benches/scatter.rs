//! Compares the scattering-matrix workload on one rayon thread against the
//! default pool. Thread-pool size, not feature flags, is what varies here, so
//! a single binary covers both shapes.

use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use whittaker_scatter::tate::{AdditiveCharData, TameMultChar};
use whittaker_scatter::whittaker::{psi_c_matrix, whittaker_dims};
use whittaker_scatter::{FqDescriptor, TameLocalDatum};

fn workload(datum: &Arc<TameLocalDatum>) -> usize {
    let psi = AdditiveCharData::base(datum);
    let pair = datum.standard_pair();
    let mut total = 0;
    for theta in TameMultChar::nontrivial_quadratics(datum) {
        for c in [datum.unit_one(), datum.uniformizer()] {
            let m = psi_c_matrix(datum, &theta, &psi, &c, &pair).unwrap();
            total += m.rank();
            let (dp, dm) = whittaker_dims(datum, &theta, &psi, &c, &pair).unwrap();
            total += dp + dm;
        }
    }
    total
}

fn bench_pools(criterion: &mut Criterion) {
    let datum = TameLocalDatum::new(FqDescriptor::prime_field(11).unwrap(), 5).unwrap();
    // warm the lazy tables outside the measurement
    let expected = workload(&datum);

    let mut group = criterion.benchmark_group("scattering");
    for threads in [1usize, 0] {
        let label = if threads == 1 { "sequential" } else { "parallel" };
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        group.bench_with_input(BenchmarkId::new(label, threads), &datum, |b, datum| {
            b.iter(|| {
                let got = pool.install(|| workload(datum));
                assert_eq!(got, expected);
            });
        });
    }
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = bench_pools
}
criterion_main!(benches);
