use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use rdcnn::kernels::Stepper;
use rdcnn_bench::{backends, fixture};

fn step(c: &mut Criterion) {
    let mut group = c.benchmark_group("step");
    for n in [128usize, 512, 1024] {
        group.throughput(Throughput::Elements((n * n) as u64));
        for backend in backends() {
            let (mut buffers, model) = fixture::<f32>(n);
            let mut stepper = Stepper::new(backend).unwrap();
            group.bench_with_input(BenchmarkId::new(backend.label(), n), &n, |b, _| {
                b.iter(|| stepper.step(&mut buffers, &model))
            });
        }
    }
    group.finish();
}

fn step_double(c: &mut Criterion) {
    let mut group = c.benchmark_group("step_f64");
    let n = 512usize;
    group.throughput(Throughput::Elements((n * n) as u64));
    for backend in backends() {
        let (mut buffers, model) = fixture::<f64>(n);
        let mut stepper = Stepper::new(backend).unwrap();
        group.bench_with_input(BenchmarkId::new(backend.label(), n), &n, |b, _| {
            b.iter(|| stepper.step(&mut buffers, &model))
        });
    }
    group.finish();
}

criterion_group!(benches, step, step_double);
criterion_main!(benches);
