//! Run configuration: a JSON file whose keys can each be overridden by a
//! command-line flag of the same name.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use rabi_core::mesolve::{self, HamiltonianMode};
use rabi_core::{FockSpace, ModelParams, Qubit};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Analytic,
    Mesolve,
    Mcwf,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Analytic => "analytic",
            Engine::Mesolve => "mesolve",
            Engine::Mcwf => "mcwf",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    FullLab,
    SlowQubit,
}

impl From<Mode> for HamiltonianMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::FullLab => HamiltonianMode::FullLab,
            Mode::SlowQubit => HamiltonianMode::SlowQubit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum InitialQubit {
    G,
    E,
}

impl From<InitialQubit> for Qubit {
    fn from(q: InitialQubit) -> Self {
        match q {
            InitialQubit::G => Qubit::Ground,
            InitialQubit::E => Qubit::Excited,
        }
    }
}

fn default_mode() -> Mode {
    Mode::FullLab
}
fn default_n_max() -> usize {
    64
}
fn default_n_traj() -> usize {
    rabi_core::mcwf::DEFAULT_N_TRAJ
}
fn default_n_report() -> usize {
    rabi_core::observables::DEFAULT_N_REPORT
}
fn default_dt() -> f64 {
    mesolve::DEFAULT_DT
}
fn default_qubit() -> InitialQubit {
    InitialQubit::G
}

/// All frequencies and rates are in units of the mode frequency `ω`, and
/// times `τ = ωt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub engine: Engine,
    #[serde(default = "default_mode")]
    pub hamiltonian_mode: Mode,
    pub g_over_omega: f64,
    pub kappa_over_omega: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_over_omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega0_over_omega: Option<f64>,
    pub tau_max: f64,
    pub tau_step: f64,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_n_traj")]
    pub n_traj: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_n_report")]
    pub n_report: usize,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_qubit")]
    pub initial_qubit: InitialQubit,
    #[serde(default)]
    pub initial_photons: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    /// Minimal configuration with every optional key at its default.
    pub fn new(
        engine: Engine,
        mode: Mode,
        g: f64,
        delta: f64,
        kappa: f64,
        tau_max: f64,
        tau_step: f64,
    ) -> Self {
        Self {
            engine,
            hamiltonian_mode: mode,
            g_over_omega: g,
            kappa_over_omega: kappa,
            delta_over_omega: Some(delta),
            omega0_over_omega: None,
            tau_max,
            tau_step,
            n_max: default_n_max(),
            n_traj: default_n_traj(),
            master_seed: 0,
            n_report: default_n_report(),
            dt: default_dt(),
            initial_qubit: InitialQubit::G,
            initial_photons: 0,
            output: None,
        }
    }

    /// `Δ/ω`, from whichever of the detuning pair was given.
    pub fn delta(&self) -> f64 {
        match (self.delta_over_omega, self.omega0_over_omega) {
            (Some(d), _) => d,
            (None, Some(w0)) => 1.0 - w0,
            (None, None) => f64::NAN,
        }
    }

    pub fn omega0(&self) -> f64 {
        1.0 - self.delta()
    }

    pub fn params(&self) -> Result<ModelParams> {
        Ok(ModelParams::new(
            1.0,
            self.omega0(),
            self.g_over_omega,
            self.kappa_over_omega,
        )?)
    }

    pub fn space(&self) -> Result<FockSpace> {
        Ok(FockSpace::new(self.n_max)?)
    }

    pub fn grid(&self) -> Vec<f64> {
        mesolve::uniform_grid(self.tau_max, self.tau_step)
    }

    pub fn validate(&self) -> Result<()> {
        match (self.delta_over_omega, self.omega0_over_omega) {
            (Some(_), Some(_)) => {
                return Err(CliError::config(
                    "give exactly one of delta_over_omega and omega0_over_omega",
                ))
            }
            (None, None) => {
                return Err(CliError::config(
                    "one of delta_over_omega or omega0_over_omega is required",
                ))
            }
            _ => {}
        }
        let finite = [
            self.g_over_omega,
            self.kappa_over_omega,
            self.delta(),
            self.tau_max,
            self.tau_step,
            self.dt,
        ];
        if finite.iter().any(|x| !x.is_finite()) {
            return Err(CliError::config("numeric parameters must be finite"));
        }
        if self.g_over_omega < 0.0 || self.kappa_over_omega < 0.0 {
            return Err(CliError::config(
                "g_over_omega and kappa_over_omega must be non-negative",
            ));
        }
        if self.tau_max <= 0.0 || self.tau_step <= 0.0 {
            return Err(CliError::config("tau_max and tau_step must be positive"));
        }
        if self.dt <= 0.0 {
            return Err(CliError::config("dt must be positive"));
        }
        if self.n_max < 1 {
            return Err(CliError::config("n_max must be at least 1"));
        }
        if self.n_report > self.n_max {
            return Err(CliError::config(format!(
                "n_report = {} exceeds n_max = {}",
                self.n_report, self.n_max
            )));
        }
        if self.initial_photons > self.n_max {
            return Err(CliError::config("initial_photons exceeds n_max"));
        }
        if self.n_traj < 1 {
            return Err(CliError::config("n_traj must be at least 1"));
        }
        if self.engine == Engine::Analytic {
            if self.initial_photons != 0 {
                return Err(CliError::config(
                    "the analytic engine starts from the vacuum (initial_photons = 0)",
                ));
            }
            if self.delta() == 0.0 && self.kappa_over_omega == 0.0 {
                return Err(CliError::config(
                    "the analytic engine needs delta_over_omega or kappa_over_omega to be nonzero",
                ));
            }
        }
        self.params()?;
        Ok(())
    }

    /// Reads a config file. A metadata sidecar written by `run` is accepted
    /// too; its embedded `config` record is used.
    pub fn load(path: &Path) -> Result<Value> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        })?;
        let value: Value = serde_json::from_str(&text).map_err(|source| CliError::Json {
            path: path.to_owned(),
            source,
        })?;
        match value {
            Value::Object(mut map) if map.contains_key("schema_version") => {
                match map.remove("config") {
                    Some(cfg @ Value::Object(_)) => Ok(cfg),
                    _ => Err(CliError::config(format!(
                        "{}: metadata file has no config record",
                        path.display()
                    ))),
                }
            }
            v @ Value::Object(_) => Ok(v),
            _ => Err(CliError::config(format!(
                "{}: expected a JSON object",
                path.display()
            ))),
        }
    }

    pub fn from_value(value: Value) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_value(value).map_err(|e| CliError::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Flags mirroring [`RunConfig`]; any flag given replaces the file value.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// JSON config file (or a metadata sidecar of an earlier run).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub engine: Option<Engine>,
    #[arg(long, value_enum)]
    pub hamiltonian_mode: Option<Mode>,
    #[arg(long)]
    pub g_over_omega: Option<f64>,
    #[arg(long)]
    pub kappa_over_omega: Option<f64>,
    /// Replaces any omega0_over_omega from the config file.
    #[arg(long, conflicts_with = "omega0_over_omega", allow_hyphen_values = true)]
    pub delta_over_omega: Option<f64>,
    /// Replaces any delta_over_omega from the config file.
    #[arg(long, allow_hyphen_values = true)]
    pub omega0_over_omega: Option<f64>,
    #[arg(long)]
    pub tau_max: Option<f64>,
    #[arg(long)]
    pub tau_step: Option<f64>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub n_traj: Option<usize>,
    #[arg(long)]
    pub master_seed: Option<u64>,
    #[arg(long)]
    pub n_report: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, value_enum)]
    pub initial_qubit: Option<InitialQubit>,
    #[arg(long)]
    pub initial_photons: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn put<T: Serialize>(map: &mut Map<String, Value>, key: &str, value: &Option<T>) {
    if let Some(v) = value {
        map.insert(
            key.to_owned(),
            serde_json::to_value(v).expect("flag values serialize"),
        );
    }
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<RunConfig> {
        let base = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => Value::Object(Map::new()),
        };
        let Value::Object(mut map) = base else {
            unreachable!("load only returns objects")
        };
        if self.delta_over_omega.is_some() {
            map.remove("omega0_over_omega");
        }
        if self.omega0_over_omega.is_some() {
            map.remove("delta_over_omega");
        }
        put(&mut map, "engine", &self.engine);
        put(&mut map, "hamiltonian_mode", &self.hamiltonian_mode);
        put(&mut map, "g_over_omega", &self.g_over_omega);
        put(&mut map, "kappa_over_omega", &self.kappa_over_omega);
        put(&mut map, "delta_over_omega", &self.delta_over_omega);
        put(&mut map, "omega0_over_omega", &self.omega0_over_omega);
        put(&mut map, "tau_max", &self.tau_max);
        put(&mut map, "tau_step", &self.tau_step);
        put(&mut map, "n_max", &self.n_max);
        put(&mut map, "n_traj", &self.n_traj);
        put(&mut map, "master_seed", &self.master_seed);
        put(&mut map, "n_report", &self.n_report);
        put(&mut map, "dt", &self.dt);
        put(&mut map, "initial_qubit", &self.initial_qubit);
        put(&mut map, "initial_photons", &self.initial_photons);
        put(&mut map, "output", &self.output);
        RunConfig::from_value(Value::Object(map))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn base() -> Value {
        json!({
            "engine": "analytic",
            "g_over_omega": 2.0,
            "kappa_over_omega": 0.01,
            "delta_over_omega": 1.0,
            "tau_max": 10.0,
            "tau_step": 0.1
        })
    }

    #[test]
    fn defaults_fill_in() {
        let cfg = RunConfig::from_value(base()).unwrap();
        assert_eq!(cfg.n_max, 64);
        assert_eq!(cfg.n_report, 20);
        assert_eq!(cfg.n_traj, 1000);
        assert_eq!(cfg.dt, 1e-3);
        assert_eq!(cfg.hamiltonian_mode, Mode::FullLab);
        assert_eq!(cfg.omega0(), 0.0);
        assert_eq!(cfg.grid().len(), 101);
    }

    #[test]
    fn detuning_pair_is_exclusive() {
        let mut v = base();
        v["omega0_over_omega"] = json!(0.2);
        assert!(matches!(
            RunConfig::from_value(v.clone()),
            Err(CliError::Config(_))
        ));
        v.as_object_mut().unwrap().remove("delta_over_omega");
        let cfg = RunConfig::from_value(v.clone()).unwrap();
        assert!((cfg.delta() - 0.8).abs() < 1e-15);
        v.as_object_mut().unwrap().remove("omega0_over_omega");
        assert!(RunConfig::from_value(v).is_err());
    }

    #[test]
    fn rejects_bad_values() {
        for (key, val) in [
            ("tau_step", json!(0.0)),
            ("tau_max", json!(-1.0)),
            ("kappa_over_omega", json!(-0.1)),
            ("n_report", json!(100)),
            ("initial_photons", json!(2)),
            ("unknown_key", json!(1)),
            ("engine", json!("qutip")),
        ] {
            let mut v = base();
            v[key] = val;
            let err = RunConfig::from_value(v).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{key}");
        }
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        let mut v = base();
        v.as_object_mut().unwrap().remove("delta_over_omega");
        v["omega0_over_omega"] = json!(0.5);
        fs::write(&path, v.to_string()).unwrap();
        let args = ConfigArgs {
            config: Some(path),
            delta_over_omega: Some(0.25),
            engine: Some(Engine::Mesolve),
            ..Default::default()
        };
        let cfg = args.resolve().unwrap();
        assert_eq!(cfg.engine, Engine::Mesolve);
        assert_eq!(cfg.delta(), 0.25);
        assert_eq!(cfg.omega0_over_omega, None);
    }

    #[test]
    fn round_trips_through_json() {
        let cfg = RunConfig::from_value(base()).unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        let back = RunConfig::from_value(serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(cfg, back);
    }
}
