use std::hint::black_box;

use awayfw::constants::{mu_away_estimate, EstimateOptions};
use awayfw::geometry::{enumerate_proper_supports, pyramidal_width_estimate};
use awayfw::harness::{generate_problem, Family};
use awayfw::{lmo, solve_afw, solve_fw, SolverConfig, StepRule, VPolytope};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nalgebra::DVector;

fn solvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    for (family, n) in [(Family::SimplexInterior, 10), (Family::SimplexFace, 10), (Family::BoxFace, 5)] {
        let spec = generate_problem(family, n, 0).unwrap();
        let k = spec.exact_constants();
        let start = spec.start();
        let cfg = SolverConfig {
            max_iters: 500,
            gap_tolerance: 1e-10,
            ..SolverConfig::with_rule(StepRule::LineSearchExact)
        };
        group.bench_with_input(BenchmarkId::new("fw", &spec.name), &spec, |b, s| {
            b.iter(|| solve_fw(&s.objective, &s.poly, black_box(&start), &cfg, &k).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("afw", &spec.name), &spec, |b, s| {
            b.iter(|| solve_afw(&s.objective, &s.poly, black_box(&start), &cfg, &k).unwrap())
        });
    }
    group.finish();
}

fn oracles(c: &mut Criterion) {
    let mut group = c.benchmark_group("lmo");
    let polys = [
        ("simplex_100", VPolytope::simplex(100).unwrap()),
        ("box_12", VPolytope::cube(12, 0.0, 1.0).unwrap()),
        ("l1_100", VPolytope::l1_ball(100).unwrap()),
    ];
    for (name, poly) in &polys {
        let g = DVector::from_fn(poly.dim(), |i, _| ((i * 7919) % 101) as f64 - 50.0);
        group.bench_function(*name, |b| b.iter(|| lmo(poly, black_box(&g)).unwrap()));
    }
    group.finish();
}

fn geometry(c: &mut Criterion) {
    let mut group = c.benchmark_group("geometry");
    group.sample_size(10);
    let cube = VPolytope::cube(2, 0.0, 1.0).unwrap();
    let center = DVector::from_vec(vec![0.5, 0.5]);
    group.bench_function("supports_square_center", |b| {
        b.iter(|| enumerate_proper_supports(black_box(&center), &cube).unwrap())
    });
    let simplex = VPolytope::simplex(4).unwrap();
    group.bench_function("pdirw_simplex_4", |b| {
        b.iter(|| pyramidal_width_estimate(&simplex, 200, 0).unwrap())
    });
    let spec = generate_problem(Family::RandomPsdSimplex, 4, 0).unwrap();
    let opts = EstimateOptions::default();
    group.bench_function("mu_away_simplex_4", |b| {
        b.iter(|| mu_away_estimate(&spec.objective, &spec.poly, opts.samples, opts.seed).unwrap())
    });
    group.finish();
}

criterion_group!(benches, solvers, oracles, geometry);
criterion_main!(benches);
