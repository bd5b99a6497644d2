use std::hint::black_box;

use abc_shadow::geometry::{candy_counts, pair_count, union_disks_area};
use abc_shadow::mcmc::pp::PpChain;
use abc_shadow::models::CandyParams;
use abc_shadow::prelude::*;
use criterion::{criterion_group, criterion_main, Criterion};
use rand::Rng;

fn geometry(c: &mut Criterion) {
    let w = Window::unit_square();
    let mut rng = RngState::new(1, 0);
    let p = PointPattern::binomial(200, w, &mut rng);
    c.bench_function("pair_count/200", |b| b.iter(|| pair_count(black_box(&p), 0.1)));

    let w3 = Window::rect(3.0, 1.0).unwrap();
    let segs: Vec<MarkedPoint> = (0..150)
        .map(|_| {
            let q = w3.sample_uniform(&mut rng);
            MarkedPoint::with_angle(q[0], q[1], rng.random_range(0.0..std::f64::consts::PI))
        })
        .collect();
    let sp = PointPattern::new(segs, w3).unwrap();
    let params = CandyParams::new(0.12, 0.01, 0.5, 0.5);
    c.bench_function("candy_counts/150", |b| b.iter(|| candy_counts(black_box(&sp), &params).unwrap()));

    let q = PointPattern::binomial(163, w, &mut rng);
    c.bench_function("union_disks_area/163", |b| b.iter(|| union_disks_area(black_box(&q), 0.05, &w, 0.005).unwrap()));
}

fn samplers(c: &mut Criterion) {
    let theta = ParameterVector::new(vec![4.6, -1.6]);
    let strauss = ModelSpec::Strauss { r: 0.1, window: Window::unit_square() };
    let cfg = PpSamplerConfig::default();
    let mut rng = RngState::new(2, 0);
    let mut chain = PpChain::empty(&strauss).unwrap();
    chain.run(&theta, 10_000, &cfg, &mut rng).unwrap();
    c.bench_function("pp_steps/strauss/1000", |b| b.iter(|| chain.run(&theta, 1000, &cfg, &mut rng).unwrap()));

    let area = ModelSpec::AreaInteraction { r: 0.05, resolution: 0.005, window: Window::unit_square() };
    let at = ParameterVector::new(vec![5.65, 2.0]);
    let mut chain = PpChain::empty(&area).unwrap();
    chain.run(&at, 10_000, &cfg, &mut rng).unwrap();
    c.bench_function("pp_steps/area/1000", |b| b.iter(|| chain.run(&at, 1000, &cfg, &mut rng).unwrap()));

    let model = ModelSpec::Gaussian { m: 1000 };
    let t = SufficientStatistics::new(vec![1765.45, 12145.83]);
    let config = ShadowConfig {
        delta: vec![0.005, 0.025],
        inner_steps: 500,
        outer_iterations: 20,
        burn_in: 0,
        thinning: 1,
        aux: AuxConfig::default(),
        initial: ParameterVector::new(vec![2.0, 9.0]),
        prior: BoxPrior::new(vec![-100.0, 0.0], vec![100.0, 200.0]).unwrap(),
    };
    c.bench_function("shadow/gaussian/20x500", |b| {
        b.iter(|| abc_shadow_run(&model, &t, &config, &mut RngState::new(3, 0)).unwrap())
    });
}

criterion_group!(benches, geometry, samplers);
criterion_main!(benches);
