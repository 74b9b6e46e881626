use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use meuq::config::{Method, RunConfig};
use meuq::experiment::{build_basis, build_grid_1d, project_initial_data};
use meuq::fv::{advance_moments, cfl_time_step, numerical_flux_hll};
use meuq::ipm::{solve_duals, NewtonConfig};
use meuq::sg::{apply_limiter, reconstruct_nodes, LimiterConfig};
use meuq::{Direction, Discretization, GasModel, MomentField, QuadratureSpec, State1};

/// Projected Sod data, and the same data after limiting.
fn sod_setup(elements: usize, degree: usize) -> (Discretization<3>, MomentField<3>, MomentField<3>) {
    let mut cfg = RunConfig::sod_1d();
    cfg.method = if elements == 1 { Method::Hsg } else { Method::MeHsg };
    cfg.basis.elements = elements;
    cfg.basis.degree = degree;
    cfg.basis.quadrature = QuadratureSpec::default_for_degree(degree);
    let grid = build_grid_1d(&cfg).unwrap();
    let basis = build_basis(&cfg).unwrap();
    let problem = cfg.problem;
    let centers: Vec<f64> = (0..grid.n_cells()).map(|c| grid.center(c).0).collect();
    let (m, _) = project_initial_data(
        |c, xi| problem.initial_1d(centers[c], xi),
        &basis,
        grid.n_cells(),
        &problem.model(),
    )
    .unwrap();
    let disc = Discretization {
        grid,
        basis,
        model: problem.model(),
        flux: cfg.flux,
        cfl: cfg.cfl,
    };
    let mut limited = m.clone();
    apply_limiter(&mut limited, &disc.basis, &disc.model, &LimiterConfig::default()).unwrap();
    (disc, m, limited)
}

fn flux(c: &mut Criterion) {
    let gas = GasModel::default();
    let l = State1::new_1d(1.0, 0.0, 2.5);
    let r = State1::new_1d(0.125, 0.0, 0.25);
    c.bench_function("hll_flux", |b| {
        b.iter(|| numerical_flux_hll(&gas, black_box(&l), black_box(&r), Direction::X))
    });
}

fn limiter(c: &mut Criterion) {
    let mut group = c.benchmark_group("limiter_sod_400");
    for (ne, k) in [(1, 14), (3, 4)] {
        let (disc, m, _) = sod_setup(ne, k);
        group.bench_with_input(BenchmarkId::from_parameter(format!("N{ne}_K{k}")), &m, |b, m| {
            b.iter(|| {
                let mut f = m.clone();
                apply_limiter(&mut f, &disc.basis, &disc.model, &LimiterConfig::default()).unwrap()
            })
        });
    }
    group.finish();
}

fn sg_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("sg_step_sod_400");
    for (ne, k) in [(1, 14), (3, 4)] {
        let (disc, _, m) = sod_setup(ne, k);
        group.bench_with_input(BenchmarkId::from_parameter(format!("N{ne}_K{k}")), &m, |b, m| {
            b.iter(|| {
                let nodes = reconstruct_nodes(m, &disc.basis);
                let ts = cfl_time_step(nodes.as_slice(), &disc.grid, &disc.model, disc.cfl).unwrap();
                advance_moments(m, &nodes, &disc, &ts)
            })
        });
    }
    group.finish();
}

fn dual_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("dual_solve_sod_400");
    group.sample_size(10);
    for (ne, k) in [(1, 14), (3, 4)] {
        let (disc, _, m) = sod_setup(ne, k);
        let warm = solve_duals(&m, &m, &disc.basis, &disc.model, &NewtonConfig::default())
            .unwrap()
            .coeffs;
        // Re-solve after one step so the warm start is not already converged.
        let nodes = reconstruct_nodes(&m, &disc.basis);
        let ts = cfl_time_step(nodes.as_slice(), &disc.grid, &disc.model, disc.cfl).unwrap();
        let next = advance_moments(&m, &nodes, &disc, &ts);
        group.bench_with_input(BenchmarkId::from_parameter(format!("N{ne}_K{k}")), &next, |b, next| {
            b.iter(|| solve_duals(next, &warm, &disc.basis, &disc.model, &NewtonConfig::default()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, flux, limiter, sg_step, dual_solve);
criterion_main!(benches);
