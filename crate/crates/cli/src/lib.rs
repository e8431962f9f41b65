//! Command-line front end for the dissipative Rabi model solvers.
//!
//! Runs are described by a [`RunConfig`]; each run writes one CSV time series
//! plus a JSON sidecar holding everything needed to reproduce it.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::Value;

pub mod compare;
pub mod config;
pub mod engine;
pub mod error;
pub mod figure;
pub mod output;

pub use config::{ConfigArgs, Engine, Mode, RunConfig};
pub use engine::{execute, Diagnostics, RunOutput, Table};
pub use error::{CliError, Result};

/// Executes `cfg` and writes the CSV to `path` and its sidecar next to it.
pub fn run_to_file(
    cfg: &RunConfig,
    path: &Path,
    chosen: &[String],
    description: Option<&str>,
) -> Result<RunOutput> {
    let out = execute(cfg)?;
    output::write_csv(path, &out.table)?;
    let mut cfg = cfg.clone();
    cfg.output = Some(path.to_owned());
    let mut meta = output::Metadata::new(&cfg, &out.table, &out.diagnostics);
    meta.chosen = chosen;
    meta.description = description;
    output::write_metadata(path, &meta)?;
    Ok(out)
}

/// Runs `cfg` to its configured output path.
pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    let path = cfg
        .output
        .clone()
        .ok_or_else(|| CliError::config("an output path is required"))?;
    run_to_file(cfg, &path, &[], None)
}

/// Writes every curve of figure `id` under `dir/fig<id>/`. Runs execute
/// concurrently; the first failure in preset order is returned.
pub fn figure(id: u8, dir: &Path) -> Result<Vec<PathBuf>> {
    let preset = figure::preset(id)?;
    let base = dir.join(format!("fig{id}"));
    let results: Vec<Result<PathBuf>> = preset
        .runs
        .par_iter()
        .map(|r| {
            let path = base.join(format!("{}.csv", r.name));
            log::info!("figure {id}: {}", r.name);
            run_to_file(&r.config, &path, &r.chosen, Some(&r.description))?;
            Ok(path)
        })
        .collect();
    results.into_iter().collect()
}

/// One config per value of `param`, each written to
/// `dir/<stem>_<param>_<value>.csv`.
pub fn sweep_configs(
    base: &RunConfig,
    param: &str,
    values: &[f64],
    dir: &Path,
) -> Result<Vec<RunConfig>> {
    let stem = base
        .output
        .as_deref()
        .and_then(Path::file_stem)
        .and_then(|s| s.to_str())
        .unwrap_or("run")
        .to_owned();
    let Value::Object(map) = serde_json::to_value(base).expect("config serializes") else {
        unreachable!()
    };
    if matches!(
        param,
        "engine" | "hamiltonian_mode" | "initial_qubit" | "output"
    ) {
        return Err(CliError::config(format!(
            "{param} cannot be swept numerically"
        )));
    }
    let numeric = matches!(
        param,
        "g_over_omega"
            | "kappa_over_omega"
            | "delta_over_omega"
            | "omega0_over_omega"
            | "tau_max"
            | "tau_step"
            | "dt"
    );
    let integral = matches!(
        param,
        "n_max" | "n_traj" | "master_seed" | "n_report" | "initial_photons"
    );
    if !numeric && !integral {
        return Err(CliError::config(format!(
            "unknown sweep parameter {param:?}"
        )));
    }
    values
        .iter()
        .map(|&v| {
            let mut m = map.clone();
            match param {
                "delta_over_omega" => {
                    m.remove("omega0_over_omega");
                }
                "omega0_over_omega" => {
                    m.remove("delta_over_omega");
                }
                _ => {}
            }
            let value = if integral {
                if v < 0.0 || v.fract() != 0.0 {
                    return Err(CliError::config(format!(
                        "{param} needs integer values, got {v}"
                    )));
                }
                Value::from(v as u64)
            } else {
                Value::from(v)
            };
            m.insert(param.to_owned(), value);
            let path = dir.join(format!("{stem}_{param}_{v}.csv"));
            m.insert(
                "output".into(),
                Value::from(path.to_string_lossy().into_owned()),
            );
            RunConfig::from_value(Value::Object(m))
        })
        .collect()
}

/// Runs every sweep point concurrently. Each run writes its own files.
pub fn sweep(base: &RunConfig, param: &str, values: &[f64], dir: &Path) -> Result<Vec<PathBuf>> {
    let configs = sweep_configs(base, param, values, dir)?;
    let results: Vec<Result<PathBuf>> = configs
        .par_iter()
        .map(|c| {
            run(c)?;
            Ok(c.output.clone().expect("sweep sets output"))
        })
        .collect();
    results.into_iter().collect()
}
