//! Kalman step cost per model and whole-scenario throughput.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tethersim_core::sim::run_scenario;
use tethersim_core::{kalman_init, kalman_step, KalmanConfig, ScenarioConfig, TensionVec};

fn bench_kalman_step(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let observations: Vec<TensionVec> = (0..256)
        .map(|_| {
            TensionVec::new(
                rng.gen_range(-0.1..0.1),
                rng.gen_range(-0.1..0.1),
                rng.gen_range(-0.1..0.0),
            )
        })
        .collect();

    for (label, cfg) in [
        ("constant", KalmanConfig::constant()),
        ("derivative", KalmanConfig::derivative()),
    ] {
        c.bench_function(&format!("kalman_step_{label}_x256"), |b| {
            b.iter(|| {
                let mut state = kalman_init(&cfg);
                for y in &observations {
                    state = kalman_step(&state, &cfg, y);
                }
                black_box(state.estimate())
            })
        });
    }
}

fn bench_hover_second(c: &mut Criterion) {
    // One simulated second of the offset hover: full catenary solve per
    // dynamics substep plus the estimation pipeline per tick.
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../scenarios/hover_offset.toml"
    ))
    .unwrap()
    .replace("duration = 30.0", "duration = 1.0");
    let cfg = ScenarioConfig::from_toml(&text).unwrap();
    c.bench_function("run_scenario_hover_offset_1s", |b| {
        b.iter(|| black_box(run_scenario(&cfg)).summary.ticks)
    });
}

criterion_group!(benches, bench_kalman_step, bench_hover_second);
criterion_main!(benches);
