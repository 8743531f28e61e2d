use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use infodyn::experiments::{scatter_poles, sweep_ar2};
use infodyn::par::{self, Execution};
use infodyn::{closed_form, ArModel, PoleSet, SpectrumGrid};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn ar2_grid(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep_ar2");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, 200), &exec, |b, &exec| {
            b.iter(|| sweep_ar2(200, exec).unwrap())
        });
    }
    group.finish();
}

fn pole_scatter(c: &mut Criterion) {
    let mut group = c.benchmark_group("scatter_poles");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, 5000), &exec, |b, &exec| {
            b.iter(|| scatter_poles(8, 5000, 1.0, 0, exec).unwrap())
        });
    }
    group.finish();
}

fn spectral_battery(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let models: Vec<ArModel> = (0..64)
        .map(|i| ArModel::from_poles(&PoleSet::sample(1 + i % 6, 1.0, 0.9, &mut rng).unwrap(), 1.0).unwrap())
        .collect();
    let mut group = c.benchmark_group("spectral_battery");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, models.len()), &exec, |b, &exec| {
            b.iter(|| {
                par::try_map_indexed(exec, models.len(), |i| {
                    let s = SpectrumGrid::from_ar(&models[i], 1 << 14)?;
                    Ok::<_, infodyn::Error>(s.means().predictive_information_rate() - closed_form::pir_ar(&models[i]))
                })
                .unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, ar2_grid, pole_scatter, spectral_battery);
criterion_main!(benches);
