use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hom_novikov::catalog::bundled;
use hom_novikov::morphisms::enumerate_fp;
use hom_novikov::par::Execution;
use hom_novikov::scalars::FieldSpec;

fn modes() -> Vec<(&'static str, Execution)> {
    let mut v = vec![("sequential", Execution::Sequential)];
    #[cfg(feature = "parallel")]
    v.push(("parallel", Execution::Parallel));
    v
}

fn enumeration(c: &mut Criterion) {
    let doc = bundled("dim3").unwrap();
    let mut group = c.benchmark_group("enumerate_fp");
    group.sample_size(10);
    for (name, prime) in [("A1", 5), ("C3", 5), ("C3", 7), ("E1", 7)] {
        let alg = doc.algebra(name).unwrap();
        let spec = FieldSpec::new(prime);
        for (mode, exec) in modes() {
            group.bench_with_input(BenchmarkId::new(mode, format!("{name}/F{prime}")), &exec, |b, &exec| {
                b.iter(|| enumerate_fp(alg, &spec, exec).unwrap().len())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, enumeration);
criterion_main!(benches);
