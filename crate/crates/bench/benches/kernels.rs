//! Microbenchmarks for the hot kernels: the Poisson solve behind the
//! canonical potential, one cell-minimization pass, and a mu1 eigensolve on
//! a small grid.

use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use glpin_core::cell::{minimize_cell, Bc, CellProblem, MinimizeOptions};
use glpin_core::field::ScalarField2D;
use glpin_core::gauge::vector_potential_from_field;
use glpin_core::grid::Grid2D;
use glpin_core::solver::{minimize_frozen, SolverOptions};
use glpin_core::spectral::mu1;

fn bench_poisson(c: &mut Criterion) {
    let g = Arc::new(Grid2D::unit_square(128).unwrap());
    let b0 = ScalarField2D::from_fn(g.clone(), |x, y| 1.0 + 0.3 * x - 0.2 * y).unwrap();
    c.bench_function("potential_from_field_128", |bench| {
        bench.iter(|| {
            let p = vector_potential_from_field(black_box(&b0), &g, 1e-10).unwrap();
            black_box(p.residual_curl)
        })
    });
}

fn bench_cell(c: &mut Criterion) {
    let opts = MinimizeOptions { seeds: 0, max_iter: 200, ..Default::default() };
    c.bench_function("cell_minimize_r10_200iters", |bench| {
        bench.iter(|| {
            let p = CellProblem::new(0.5, 1.0, 1, 10.0, Bc::Dirichlet, 64).unwrap();
            let (_, e) = minimize_cell(black_box(&p), &opts).unwrap();
            black_box(e)
        })
    });
}

fn bench_frozen(c: &mut Criterion) {
    let g = Arc::new(Grid2D::unit_square(96).unwrap());
    let a = ScalarField2D::constant(g.clone(), 1.0);
    let b0 = ScalarField2D::constant(g.clone(), 1.0);
    let opts = SolverOptions { max_iter: 150, ..Default::default() };
    c.bench_function("frozen_minimize_96_150iters", |bench| {
        bench.iter(|| {
            let rep = minimize_frozen(black_box(&a), &b0, 8.0, 4.0, &opts).unwrap();
            black_box(rep.state.energy)
        })
    });
}

fn bench_mu1(c: &mut Criterion) {
    let g = Arc::new(Grid2D::unit_square(64).unwrap());
    let a = ScalarField2D::constant(g.clone(), 1.0);
    let b0 = ScalarField2D::constant(g.clone(), 1.0);
    let bundle = Arc::new(vector_potential_from_field(&b0, &g, 1e-10).unwrap());
    c.bench_function("mu1_64", |bench| {
        bench.iter(|| {
            let (r, _) = mu1(6.0, 12.0, black_box(&a), &bundle.f, 1e-7, None).unwrap();
            black_box(r.value)
        })
    });
}

criterion_group! {
    name = kernels;
    config = Criterion::default().sample_size(10);
    targets = bench_poisson, bench_cell, bench_frozen, bench_mu1
}
criterion_main!(kernels);
