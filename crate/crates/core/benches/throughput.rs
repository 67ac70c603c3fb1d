use std::hint::black_box;

use afterimage::model::predict_batch_with;
use afterimage::render::{blur_field, render_figure_with, stimulus_field};
use afterimage::{BaselineScheme, BlurSettings, Exec, Geometry, Rgb, StimulusSpec};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn modes() -> Vec<(&'static str, Exec)> {
    let mut m = vec![("sequential", Exec::Sequential)];
    #[cfg(feature = "parallel")]
    m.push(("parallel", Exec::Parallel));
    m
}

fn random_specs(n: usize) -> Vec<StimulusSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut color = || Rgb::new(rng.random(), rng.random(), rng.random()).unwrap();
    (0..n)
        .map(|_| StimulusSpec::new(color(), color(), color()))
        .collect()
}

fn bench_predict(c: &mut Criterion) {
    let specs = random_specs(100_000);
    let mut group = c.benchmark_group("predict_batch_100k");
    for (name, exec) in modes() {
        group.bench_function(name, |b| b.iter(|| predict_batch_with(black_box(&specs), exec)));
    }
    group.finish();
}

fn bench_blur(c: &mut Criterion) {
    let mut group = c.benchmark_group("blur_512");
    let g = Geometry::default();
    let field = stimulus_field(&g, Rgb::RED, Rgb::WHITE, Exec::Sequential);
    for sigma in [2.0, 4.0, 8.0] {
        let blur = BlurSettings::new(sigma).unwrap();
        for (name, exec) in modes() {
            group.bench_with_input(BenchmarkId::new(name, sigma), &blur, |b, blur| {
                b.iter(|| blur_field(black_box(&field), blur, exec))
            });
        }
    }
    group.finish();
}

fn bench_figure(c: &mut Criterion) {
    let mut group = c.benchmark_group("render_figure_512");
    group.sample_size(20);
    let g = Geometry::default();
    let blur = BlurSettings::default();
    let spec = StimulusSpec::new(Rgb::RED, Rgb::GREEN, Rgb::YELLOW);
    for (name, exec) in modes() {
        group.bench_function(name, |b| {
            b.iter(|| render_figure_with(black_box(&spec), BaselineScheme::Group2, &g, &blur, exec))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_predict, bench_blur, bench_figure);
criterion_main!(benches);
