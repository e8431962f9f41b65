//! Cross-checks between the closed-form solution, the master-equation
//! integrator and the trajectory ensemble.

use std::f64::consts::PI;

use rabi_core::analytic::{AnalyticModel, Parity, Sector};
use rabi_core::mcwf::{self, Channel, McwfSpec, TrajectorySeed};
use rabi_core::mesolve::{self, uniform_grid, EvolutionSpec, HamiltonianMode};
use rabi_core::observables::{self, measure};
use rabi_core::{DensityMatrix, FockSpace, ModelParams, PureState, Qubit, C64};

fn slow_run(g: f64, kappa: f64, n_max: usize, grid: Vec<f64>) -> mesolve::Evolution {
    let space = FockSpace::new(n_max).unwrap();
    let params = ModelParams::from_detuning(g, 1.0, kappa).unwrap();
    let spec = EvolutionSpec::new(
        HamiltonianMode::SlowQubit,
        params,
        space,
        grid,
        DensityMatrix::basis(space, Qubit::Ground, 0),
    )
    .unwrap();
    mesolve::evolve(&spec).unwrap()
}

#[test]
fn master_equation_matches_closed_form() {
    let n_max = 50;
    let space = FockSpace::new(n_max).unwrap();
    for kappa in [0.01, 0.2] {
        let model = AnalyticModel::new(2.0, 1.0, kappa, Qubit::Ground).unwrap();
        let run = slow_run(2.0, kappa, n_max, uniform_grid(2.0 * PI, PI / 8.0));
        assert!(run.diagnostics.max_trace_drift < 1e-8);
        assert!(run.diagnostics.max_hermiticity_error < 1e-9);
        for (t, rho) in run.times.iter().zip(&run.states) {
            let o = measure(rho, space).unwrap();
            assert!((o.mean_photon - model.mean_photon(*t)).abs() < 1e-5 * (1.0 + o.mean_photon));
            let (pg, pe) = model.qubit_populations(*t);
            assert!((o.p_g - pg).abs() < 1e-8, "t = {t}: {} vs {pg}", o.p_g);
            assert!((o.p_e - pe).abs() < 1e-8);
            assert!((o.purity - model.purity(*t)).abs() < 1e-7);
            let pops = rho.populations();
            for q in [Qubit::Ground, Qubit::Excited] {
                assert!((pops[space.index(q, 0)] - model.joint_prob(*t, q, 0)).abs() < 1e-8);
            }
            for n in 0..=20 {
                assert!((o.chain_plus[n] - model.chain_prob(*t, Parity::Plus, n)).abs() < 1e-6);
                assert!((o.chain_minus[n] - model.chain_prob(*t, Parity::Minus, n)).abs() < 1e-6);
            }
        }
        for (k, t) in run.times.iter().enumerate() {
            if k % 8 == 0 && k > 0 {
                let exact = model.density_matrix(*t, space).unwrap();
                let dist = observables::trace_distance(&exact, &run.states[k]).unwrap();
                assert!(
                    dist < 1e-6,
                    "kappa = {kappa}, t = {t}: trace distance {dist}"
                );
            }
        }
    }
}

#[test]
fn sector_characteristic_functions() {
    let space = FockSpace::new(50).unwrap();
    let model = AnalyticModel::new(2.0, 1.0, 0.2, Qubit::Ground).unwrap();
    let alpha = C64::new(0.3, 0.1);
    for t in [0.7, PI, 5.0] {
        let rho = model.density_matrix(t, space).unwrap();
        for sector in [
            Sector::PlusPlus,
            Sector::MinusMinus,
            Sector::PlusMinus,
            Sector::MinusPlus,
        ] {
            let block = observables::sigma_x_block(&rho, space, sector).unwrap();
            let numeric = observables::mode_char_function(&block, alpha);
            let exact = model.char_function(t, alpha, sector);
            assert!((numeric - exact).norm() < 1e-8, "{sector:?} at t = {t}");
        }
        let total = observables::char_function(&rho, space, alpha).unwrap();
        let sum = model.char_function(t, alpha, Sector::PlusPlus)
            + model.char_function(t, alpha, Sector::MinusMinus);
        assert!((total - sum).norm() < 1e-8);
    }
}

#[test]
fn measured_closed_form_state() {
    let space = FockSpace::new(60).unwrap();
    let model = AnalyticModel::new(2.0, 1.0, 0.01, Qubit::Ground).unwrap();
    let rho = model.density_matrix(PI, space).unwrap();
    let o = measure(&rho, space).unwrap();
    assert!((o.mean_photon - model.mean_photon(PI)).abs() < 1e-8);
    let (pg, pe) = model.qubit_populations(PI);
    assert!((o.p_g - pg).abs() < 1e-8 && (o.p_e - pe).abs() < 1e-8);
    assert!((o.purity - model.purity(PI)).abs() < 1e-8);
    for n in 0..=20 {
        assert!((o.photon_dist[n] - model.photon_dist(PI, n)).abs() < 1e-8);
        assert!((o.chain_plus[n] - model.chain_prob(PI, Parity::Plus, n)).abs() < 1e-8);
        assert!((o.chain_minus[n] - model.chain_prob(PI, Parity::Minus, n)).abs() < 1e-8);
    }
}

#[test]
fn purity_and_decoherence_values() {
    let weak = AnalyticModel::new(2.0, 1.0, 0.01, Qubit::Ground).unwrap();
    let strong = AnalyticModel::new(2.0, 1.0, 0.2, Qubit::Ground).unwrap();
    // the coherence weight F e^{2|β|²} of |β⟩⟨−β| decays at rate 2κ|β|²
    for m in [weak, strong] {
        let t = 10.0;
        let steps = 20_000;
        let h = t / steps as f64;
        let f = |s: f64| -2.0 * m.kappa() * m.beta(s).norm_sqr();
        let mut acc = f(0.0) + f(t);
        for k in 1..steps {
            acc += if k % 2 == 1 { 4.0 } else { 2.0 } * f(k as f64 * h);
        }
        let ln_f = acc * h / 3.0 - 2.0 * m.beta(t).norm_sqr();
        assert!((m.log_decoherence(t) - ln_f).abs() < 1e-9 * (1.0 + ln_f.abs()));
    }
    assert!((strong.purity(20.0) - 0.5).abs() < 1e-2);
    assert!(weak.purity(20.0) > 0.5 && weak.purity(20.0) < 1.0);
}

#[test]
fn trajectory_waiting_time_is_exponential() {
    let kappa = 1.0;
    let space = FockSpace::new(2).unwrap();
    let params = ModelParams::new(1.0, 0.0, 0.0, kappa).unwrap();
    let spec = McwfSpec::new(HamiltonianMode::FullLab, params, space, vec![0.0, 30.0])
        .unwrap()
        .with_dt(1e-2)
        .unwrap()
        .with_n_report(1)
        .unwrap();
    let psi0 = PureState::basis(space, Qubit::Ground, 1);
    let n = 10_000;
    let waits: Vec<f64> = (0..n)
        .map(|i| {
            let tr = mcwf::run_trajectory(&psi0, &spec, TrajectorySeed::new(11, i)).unwrap();
            assert_eq!(tr.jumps.len(), 1);
            tr.jumps[0].t
        })
        .collect();
    let mean = waits.iter().sum::<f64>() / n as f64;
    let var = waits.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    let stderr = (var / n as f64).sqrt();
    assert!(
        (mean - 1.0 / kappa).abs() < 3.0 * stderr,
        "mean {mean} ± {stderr}"
    );
}

fn small_ensemble_spec() -> (McwfSpec, PureState) {
    let space = FockSpace::new(24).unwrap();
    let params = ModelParams::from_detuning(1.0, 0.8, 0.3).unwrap();
    let spec = McwfSpec::new(
        HamiltonianMode::FullLab,
        params,
        space,
        uniform_grid(3.0, 0.25),
    )
    .unwrap()
    .with_n_report(6)
    .unwrap();
    (spec, PureState::basis(space, Qubit::Ground, 0))
}

#[test]
fn ensemble_agrees_with_master_equation() {
    let (spec, psi0) = small_ensemble_spec();
    let ens = mcwf::run_ensemble(&psi0, &spec, 400, 7).unwrap();
    let me = EvolutionSpec::new(
        spec.mode,
        spec.params,
        spec.space,
        spec.t_grid.clone(),
        psi0.to_density(),
    )
    .unwrap();
    let run = mesolve::evolve(&me).unwrap();
    for (k, rho) in run.states.iter().enumerate() {
        let o = measure(rho, spec.space).unwrap();
        for (ch, exact) in [
            (Channel::MeanPhoton, o.mean_photon),
            (Channel::ProbGround, o.p_g),
        ] {
            let band = ens.consistency_band(k, ch, exact, 4.0);
            assert!(
                (ens.mean(k, ch) - exact).abs() <= band,
                "{ch:?} at t = {}: {} vs {exact} (band {band})",
                spec.t_grid[k],
                ens.mean(k, ch)
            );
        }
    }
    assert!(ens.total_jumps() > 0);
}

#[test]
fn ensemble_is_independent_of_thread_count() {
    let (spec, psi0) = small_ensemble_spec();
    let run_with = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| mcwf::run_ensemble(&psi0, &spec, 50, 99).unwrap())
    };
    let one = run_with(1);
    let four = run_with(4);
    assert_eq!(one.jump_counts, four.jump_counts);
    for k in 0..spec.t_grid.len() {
        for ch in [
            Channel::MeanPhoton,
            Channel::ProbExcited,
            Channel::ChainMinus(3),
        ] {
            assert_eq!(one.mean(k, ch).to_bits(), four.mean(k, ch).to_bits());
            assert_eq!(one.stderr(k, ch).to_bits(), four.stderr(k, ch).to_bits());
        }
    }
}

#[test]
fn unitary_runs_stay_in_one_chain() {
    let space = FockSpace::new(50).unwrap();
    let run = slow_run(2.0, 0.0, 50, uniform_grid(4.0 * PI, PI / 4.0));
    let model = AnalyticModel::new(2.0, 1.0, 0.0, Qubit::Ground).unwrap();
    for (t, rho) in run.times.iter().zip(&run.states) {
        let o = measure(rho, space).unwrap();
        assert!(o.chain_minus_total() < 1e-9);
        let s = model.snapshot(*t);
        assert!((s.f * (2.0 * s.beta.norm_sqr()).exp() - 1.0).abs() < 1e-9);
    }
}
