use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rabi_core::mcwf::{self, McwfSpec};
use rabi_core::mesolve::{self, uniform_grid, EvolutionSpec, HamiltonianMode};
use rabi_core::{
    AnalyticModel, DensityMatrix, FockSpace, ModelParams, PureState, Qubit, TrajectorySeed, C64,
};

fn params() -> ModelParams {
    ModelParams::from_detuning(2.0, 0.8, 0.01).unwrap()
}

fn sparse_products(c: &mut Criterion) {
    let mut group = c.benchmark_group("csr_mul_dense");
    for n_max in [16, 32, 64] {
        let space = FockSpace::new(n_max).unwrap();
        let h = HamiltonianMode::FullLab
            .hamiltonian(&params(), space)
            .to_sparse();
        let d = space.dim();
        let rho: Vec<C64> = (0..d * d)
            .map(|k| C64::new((k % 7) as f64, (k % 3) as f64))
            .collect();
        let mut out = vec![C64::new(0.0, 0.0); d * d];
        group.bench_with_input(BenchmarkId::from_parameter(n_max), &n_max, |b, _| {
            b.iter(|| h.mul_dense(black_box(&rho), &mut out))
        });
    }
    group.finish();
}

fn master_equation(c: &mut Criterion) {
    let mut group = c.benchmark_group("mesolve_unit_time");
    group.sample_size(10);
    for n_max in [32, 48] {
        let space = FockSpace::new(n_max).unwrap();
        let spec = EvolutionSpec::new(
            HamiltonianMode::FullLab,
            params(),
            space,
            vec![0.0, 1.0],
            DensityMatrix::basis(space, Qubit::Ground, 0),
        )
        .unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n_max), &spec, |b, spec| {
            b.iter(|| mesolve::evolve_with(spec, |_, _| Ok(())).unwrap())
        });
    }
    group.finish();
}

fn trajectory(c: &mut Criterion) {
    let space = FockSpace::new(32).unwrap();
    let spec = McwfSpec::new(
        HamiltonianMode::FullLab,
        params(),
        space,
        uniform_grid(2.0, 0.25),
    )
    .unwrap();
    let psi0 = PureState::basis(space, Qubit::Ground, 0);
    let mut index = 0;
    c.bench_function("mcwf_trajectory_tau2", |b| {
        b.iter(|| {
            index += 1;
            mcwf::run_trajectory(&psi0, &spec, TrajectorySeed::new(1, index)).unwrap()
        })
    });
}

fn closed_form(c: &mut Criterion) {
    let model = AnalyticModel::new(2.0, 1.0, 0.01, Qubit::Ground).unwrap();
    c.bench_function("analytic_snapshot_chains", |b| {
        b.iter(|| {
            let snap = model.snapshot(black_box(3.0 * PI));
            (0..=20).map(|n| snap.photon_dist(n)).sum::<f64>() + snap.mean_photon()
        })
    });
    let space = FockSpace::new(64).unwrap();
    c.bench_function("analytic_density_matrix_n64", |b| {
        b.iter(|| model.density_matrix(black_box(PI), space).unwrap())
    });
}

criterion_group!(
    benches,
    sparse_products,
    master_equation,
    trajectory,
    closed_form
);
criterion_main!(benches);
