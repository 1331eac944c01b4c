use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use varqd_bench::{coupled_pair, grid, packet, pair_state, quartic};
use varqd_core::frozen;
use varqd_core::propagate::{integrate, HartreeFlow};
use varqd_core::reference::split_step;
use varqd_core::{FrozenModel, GridHamiltonian, HartreeModel, IntegratorConfig, Principle};

fn apply_h(c: &mut Criterion) {
    let mut group = c.benchmark_group("apply_h");
    for (dim, points) in [(1, 256), (1, 1024), (2, 128)] {
        let g = grid(dim, points);
        let h = GridHamiltonian::new(&quartic(), &g).unwrap();
        let u = frozen::synthesize(&packet(dim), &g).unwrap();
        group.bench_with_input(BenchmarkId::new(format!("{dim}d"), points), &u, |b, u| {
            b.iter(|| h.apply(u).unwrap())
        });
    }
    group.finish();
}

fn frozen_eom(c: &mut Criterion) {
    let g = grid(1, 256);
    let analytic = FrozenModel::new(&quartic(), Principle::Mvp).unwrap();
    let on_grid = FrozenModel::on_grid(&quartic(), Principle::Mvp, &g).unwrap();
    let p = packet(1);
    c.bench_function("frozen_eom/analytic", |b| {
        b.iter(|| analytic.eom(&p).unwrap())
    });
    c.bench_function("frozen_epsilon/grid_256", |b| {
        b.iter(|| on_grid.epsilon(&p).unwrap())
    });
}

fn hartree_eom(c: &mut Criterion) {
    let (g, s) = pair_state(128);
    let model = HartreeModel::new(&coupled_pair(), &[g.clone(), g]).unwrap();
    c.bench_function("hartree_eom/pair_128", |b| {
        b.iter(|| model.eom(&s).unwrap())
    });
    c.bench_function("hartree_epsilon/pair_128", |b| {
        b.iter(|| model.epsilon(&s).unwrap())
    });
    let flow = HartreeFlow::new(model);
    c.bench_function("hartree_rk4/100_steps", |b| {
        b.iter(|| integrate(&flow, s.clone(), &IntegratorConfig::rk4(0.005, 0.5)).unwrap())
    });
}

fn reference(c: &mut Criterion) {
    let mut group = c.benchmark_group("split_step_100");
    group.sample_size(20);
    for (dim, points) in [(1, 512), (2, 128)] {
        let g = grid(dim, points);
        let psi = frozen::synthesize(&packet(dim), &g).unwrap();
        group.bench_with_input(
            BenchmarkId::new(format!("{dim}d"), points),
            &psi,
            |b, psi| b.iter(|| split_step(psi, &quartic(), 1e-3, 100, 100).unwrap()),
        );
    }
    group.finish();
}

criterion_group!(benches, apply_h, frozen_eom, hartree_eom, reference);
criterion_main!(benches);
