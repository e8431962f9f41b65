//! Executes a [`RunConfig`] with the selected engine and tabulates the result.

use rabi_core::analytic::{AnalyticModel, Parity};
use rabi_core::mcwf::{self, Channel, McwfSpec};
use rabi_core::mesolve::{self, EvolutionSpec};
use rabi_core::observables::measure;
use rabi_core::{DensityMatrix, PureState};
use serde::Serialize;

use crate::config::{Engine, RunConfig};
use crate::error::Result;

/// Column-oriented time series with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

/// Header shared by every engine; mcwf appends `stderr_` columns.
pub fn base_columns(n_report: usize) -> Vec<String> {
    let mut cols: Vec<String> = ["tau", "mean_photon", "p_g", "p_e", "purity"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    cols.extend((0..=n_report).map(|n| format!("chain_plus_{n}")));
    cols.extend((0..=n_report).map(|n| format!("chain_minus_{n}")));
    cols
}

/// Health figures recorded with every run; fields that an engine does not
/// produce are omitted.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_trace_drift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_hermiticity_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_eigenvalue: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_top_population: Option<f64>,
    /// Largest `1 − Σ_{n ≤ n_max} P_n` of the closed-form photon statistics.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_tail_population: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_jumps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_jumps: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub table: Table,
    pub diagnostics: Diagnostics,
}

pub fn execute(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    match cfg.engine {
        Engine::Analytic => run_analytic(cfg),
        Engine::Mesolve => run_mesolve(cfg),
        Engine::Mcwf => run_mcwf(cfg),
    }
}

fn run_analytic(cfg: &RunConfig) -> Result<RunOutput> {
    let model = AnalyticModel::new(
        cfg.g_over_omega,
        cfg.delta(),
        cfg.kappa_over_omega,
        cfg.initial_qubit.into(),
    )?;
    let mut rows = Vec::new();
    let mut tail: f64 = 0.0;
    for t in cfg.grid() {
        let s = model.snapshot(t);
        let (p_g, p_e) = s.qubit_populations();
        let kept: f64 = (0..=cfg.n_max).map(|n| s.photon_dist(n)).sum();
        tail = tail.max(1.0 - kept);
        let mut row = vec![t, s.mean_photon(), p_g, p_e, s.purity()];
        row.extend((0..=cfg.n_report).map(|n| s.chain_prob(Parity::Plus, n)));
        row.extend((0..=cfg.n_report).map(|n| s.chain_prob(Parity::Minus, n)));
        rows.push(row);
    }
    Ok(RunOutput {
        table: Table {
            columns: base_columns(cfg.n_report),
            rows,
        },
        diagnostics: Diagnostics {
            max_tail_population: Some(tail.max(0.0)),
            ..Default::default()
        },
    })
}

fn run_mesolve(cfg: &RunConfig) -> Result<RunOutput> {
    let space = cfg.space()?;
    let initial = DensityMatrix::basis(space, cfg.initial_qubit.into(), cfg.initial_photons);
    let spec = EvolutionSpec::new(
        cfg.hamiltonian_mode.into(),
        cfg.params()?,
        space,
        cfg.grid(),
        initial,
    )?
    .with_dt(cfg.dt)?;
    let mut rows = Vec::new();
    let d = mesolve::evolve_with(&spec, |t, rho| {
        let o = measure(rho, space)?;
        let mut row = vec![t, o.mean_photon, o.p_g, o.p_e, o.purity];
        row.extend_from_slice(&o.chain_plus[..=cfg.n_report]);
        row.extend_from_slice(&o.chain_minus[..=cfg.n_report]);
        rows.push(row);
        Ok(())
    })?;
    Ok(RunOutput {
        table: Table {
            columns: base_columns(cfg.n_report),
            rows,
        },
        diagnostics: Diagnostics {
            steps: Some(d.steps),
            max_trace_drift: Some(d.max_trace_drift),
            max_hermiticity_error: Some(d.max_hermiticity_error),
            min_eigenvalue: Some(d.min_eigenvalue),
            max_top_population: Some(d.max_top_population),
            ..Default::default()
        },
    })
}

fn channels(n_report: usize) -> Vec<Channel> {
    let mut ch = vec![
        Channel::MeanPhoton,
        Channel::ProbGround,
        Channel::ProbExcited,
    ];
    ch.extend((0..=n_report).map(Channel::ChainPlus));
    ch.extend((0..=n_report).map(Channel::ChainMinus));
    ch
}

fn run_mcwf(cfg: &RunConfig) -> Result<RunOutput> {
    let space = cfg.space()?;
    let psi0 = PureState::basis(space, cfg.initial_qubit.into(), cfg.initial_photons);
    let spec = McwfSpec::new(
        cfg.hamiltonian_mode.into(),
        cfg.params()?,
        space,
        cfg.grid(),
    )?
    .with_dt(cfg.dt)?
    .with_n_report(cfg.n_report)?;
    let ens = mcwf::run_ensemble(&psi0, &spec, cfg.n_traj, cfg.master_seed)?;
    if ens.max_top_population > mesolve::TRUNCATION_TOLERANCE {
        return Err(rabi_core::Error::Truncation {
            n_max: cfg.n_max,
            t: f64::NAN,
            population: ens.max_top_population,
        }
        .into());
    }

    let chans = channels(cfg.n_report);
    let mut columns = base_columns(cfg.n_report);
    columns.extend(
        columns[1..]
            .iter()
            .filter(|c| c.as_str() != "purity")
            .map(|c| format!("stderr_{c}"))
            .collect::<Vec<_>>(),
    );
    let rows = spec
        .t_grid
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let mean = chans.iter().map(|&c| ens.mean(k, c));
            let mut row = vec![t];
            let mut means: Vec<f64> = mean.collect();
            // the trajectory average of populations does not determine Tr ρ²
            means.insert(3, f64::NAN);
            row.extend(means);
            row.extend(chans.iter().map(|&c| ens.stderr(k, c)));
            row
        })
        .collect();
    Ok(RunOutput {
        table: Table { columns, rows },
        diagnostics: Diagnostics {
            max_top_population: Some(ens.max_top_population),
            total_jumps: Some(ens.total_jumps()),
            mean_jumps: Some(ens.mean_jumps()),
            ..Default::default()
        },
    })
}
