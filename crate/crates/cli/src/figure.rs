//! Parameter presets regenerating the data behind figures 1–8.
//!
//! Values that the figure captions do not state are listed in each run's
//! `chosen` set and written to the metadata sidecar.

use std::f64::consts::PI;

use crate::config::{Engine, Mode, RunConfig};
use crate::error::{CliError, Result};

pub const FIGURE_IDS: std::ops::RangeInclusive<u8> = 1..=8;

/// Detunings of the numerical curves in figures 6–8.
pub const NUMERICAL_DETUNINGS: [f64; 4] = [0.75, 0.5, 0.25, 0.0];
/// Couplings of figure 1.
pub const FIG1_COUPLINGS: [f64; 4] = [0.5, 1.0, 2.0, 3.0];
pub const FIG8_DAMPING: [f64; 3] = [0.3, 0.5, 1.0];
pub const FIG5_SEED: u64 = 20_110;

#[derive(Debug, Clone, PartialEq)]
pub struct PresetRun {
    /// File stem inside the figure directory.
    pub name: String,
    pub config: RunConfig,
    pub chosen: Vec<String>,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigurePreset {
    pub id: u8,
    pub runs: Vec<PresetRun>,
}

fn run(
    name: String,
    config: RunConfig,
    chosen: &[&str],
    description: impl Into<String>,
) -> PresetRun {
    PresetRun {
        name,
        config,
        chosen: chosen.iter().map(|s| s.to_string()).collect(),
        description: description.into(),
    }
}

fn analytic(g: f64, kappa: f64, tau_max: f64, tau_step: f64) -> RunConfig {
    RunConfig::new(
        Engine::Analytic,
        Mode::SlowQubit,
        g,
        1.0,
        kappa,
        tau_max,
        tau_step,
    )
}

/// Lab-frame master-equation run used for the detuned numerical curves.
fn numerical(delta: f64, kappa: f64) -> RunConfig {
    let mut c = RunConfig::new(
        Engine::Mesolve,
        Mode::FullLab,
        2.0,
        delta,
        kappa,
        12.0,
        0.05,
    );
    c.n_max = 80;
    c
}

const NUMERICAL_CHOSEN: [&str; 4] = ["engine", "tau_max", "tau_step", "n_max"];

fn fmt(x: f64) -> String {
    format!("{x}")
}

pub fn preset(id: u8) -> Result<FigurePreset> {
    let long = 12.0 * PI;
    let runs = match id {
        1 => FIG1_COUPLINGS
            .iter()
            .map(|&g| {
                run(
                    format!("analytic_g_{}", fmt(g)),
                    analytic(g, 0.01, long, 0.01),
                    &["g_over_omega", "tau_max", "tau_step"],
                    "chain probabilities, mean photon number and purity versus coupling",
                )
            })
            .collect(),
        2 => vec![run(
            "analytic".into(),
            analytic(2.0, 0.01, long, 0.01),
            &["tau_max", "tau_step"],
            "time evolution of both parity chains, mean photon number and ground-state probability",
        )],
        3 => vec![run(
            "snapshots".into(),
            analytic(2.0, 0.01, long, PI),
            &[],
            "chain probabilities for n <= 20 at tau = pi*l, l = 0..12",
        )],
        4 => vec![run(
            "analytic".into(),
            analytic(2.0, 0.2, 40.0, 0.02),
            &["tau_max", "tau_step"],
            "approach to the steady state",
        )],
        5 => {
            let mut mc = RunConfig::new(Engine::Mcwf, Mode::FullLab, 2.0, 0.8, 0.01, 12.0, 0.05);
            mc.master_seed = FIG5_SEED;
            vec![
                run(
                    "analytic".into(),
                    analytic(2.0, 0.01, 12.0, 0.05),
                    &["tau_max", "tau_step"],
                    "analytic mean photon number, slow-qubit limit",
                ),
                run(
                    "mcwf_delta_0.8".into(),
                    mc,
                    &["tau_max", "tau_step", "n_traj", "master_seed", "n_max"],
                    "trajectory-averaged mean photon number at delta/omega = 0.8",
                ),
            ]
        }
        6 => NUMERICAL_DETUNINGS
            .iter()
            .map(|&d| {
                let mut chosen = NUMERICAL_CHOSEN.to_vec();
                chosen.push("delta_over_omega");
                run(
                    format!("mesolve_delta_{}", fmt(d)),
                    numerical(d, 0.01),
                    &chosen,
                    "lowest chain probabilities versus detuning",
                )
            })
            .collect(),
        7 => {
            let mut runs = vec![run(
                "analytic".into(),
                analytic(2.0, 0.01, 12.0, 0.05),
                &["tau_max", "tau_step"],
                "analytic mean photon number, slow-qubit limit",
            )];
            runs.extend(NUMERICAL_DETUNINGS.iter().map(|&d| {
                run(
                    format!("mesolve_delta_{}", fmt(d)),
                    numerical(d, 0.01),
                    &NUMERICAL_CHOSEN,
                    "lab-frame mean photon number at finite qubit frequency",
                )
            }));
            runs
        }
        8 => {
            let mut runs = Vec::new();
            for &k in &FIG8_DAMPING {
                runs.push(run(
                    format!("analytic_kappa_{}", fmt(k)),
                    analytic(2.0, k, 12.0, 0.05),
                    &["tau_max", "tau_step"],
                    "analytic mean photon number, slow-qubit limit",
                ));
                runs.extend(NUMERICAL_DETUNINGS.iter().map(|&d| {
                    run(
                        format!("mesolve_kappa_{}_delta_{}", fmt(k), fmt(d)),
                        numerical(d, k),
                        &NUMERICAL_CHOSEN,
                        "lab-frame mean photon number versus damping",
                    )
                }));
            }
            runs
        }
        _ => {
            return Err(CliError::config(format!(
                "figure id must be in 1..=8, got {id}"
            )))
        }
    };
    Ok(FigurePreset { id, runs })
}
