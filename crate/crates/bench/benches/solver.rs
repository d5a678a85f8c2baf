//! Inverse-solver throughput across sag regimes.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tethersim_core::catenary::{initial_guess_a, solve_from_endpoints, Point2, SolverSettings};
use tethersim_core::TetherProperties;

fn bench_solve(c: &mut Criterion) {
    let settings = SolverSettings::default();
    let mut group = c.benchmark_group("solve_from_endpoints");
    for (label, p2, s_total) in [
        ("shallow_sag", Point2::new(1.0, 0.5), 1.2),
        ("moderate_sag", Point2::new(1.0, 0.5), 1.6),
        ("deep_sag", Point2::new(0.6, 0.1), 2.4),
        ("near_taut", Point2::new(1.0, 0.0), 1.01),
    ] {
        let tether = TetherProperties::new(0.0478, s_total);
        group.bench_with_input(BenchmarkId::from_parameter(label), &tether, |b, tether| {
            b.iter(|| {
                solve_from_endpoints(
                    black_box(Point2::new(0.0, 0.0)),
                    black_box(p2),
                    tether,
                    &settings,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

fn bench_randomized_batch(c: &mut Criterion) {
    // The validation suite solves 1000 random curves; this tracks that
    // batch cost.
    let settings = SolverSettings::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cases: Vec<(Point2, Point2, TetherProperties)> = (0..1000)
        .map(|_| {
            let span: f64 = rng.gen_range(0.2..2.0);
            let dy: f64 = rng.gen_range(-0.8..0.8) * span;
            let chord = span.hypot(dy);
            let tether = TetherProperties::new(0.05, rng.gen_range(1.05..1.8) * chord);
            (Point2::new(0.0, 0.0), Point2::new(span, dy), tether)
        })
        .collect();
    c.bench_function("solve_1000_random_curves", |b| {
        b.iter(|| {
            let mut solved = 0usize;
            for (p1, p2, tether) in &cases {
                if solve_from_endpoints(*p1, *p2, tether, &settings).is_ok() {
                    solved += 1;
                }
            }
            black_box(solved)
        })
    });
}

fn bench_initial_guess(c: &mut Criterion) {
    c.bench_function("initial_guess_a", |b| {
        b.iter(|| initial_guess_a(black_box(0.5), black_box(0.3), black_box(1.6)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_solve,
    bench_randomized_batch,
    bench_initial_guess
);
criterion_main!(benches);
