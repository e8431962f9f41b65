//! Lindblad master-equation integration on the truncated space.
//!
//! Solves `ρ' = −i[H, ρ] + (κ/2)(2aρa† − a†aρ − ρa†a)` with classical RK4 at
//! a fixed step. Two Hamiltonians are supported: the lab-frame Rabi model and
//! the slow-qubit model. The slow-qubit run, viewed in the `σx` basis, is the
//! set of four coupled sector equations with `cos(ω0 t) → 1`, `sin(ω0 t) → 0`;
//! the lab-frame run is the exact model.
//!
//! There is no interaction-picture integrator. `U(t) = exp(i H0 t)` with
//! `H0 = ω0(σz/2 + a†a)` is diagonal in the Fock basis, so `UρU†` only
//! rephases coherences and leaves every population-derived observable
//! (`P_{g/e,n}`, `⟨N⟩`, chain probabilities) and the purity unchanged.
//!
//! The dissipator is the bare-mode damping term as written above, even deep in
//! the strong coupling regime where a dressed-state master equation would
//! differ.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::{self, FockSpace, ModelParams, Operator};
use crate::rk4::{substeps, Rk4};
use crate::sparse::CsrMatrix;
use crate::state::DensityMatrix;
use crate::C64;

/// Default fixed step in units of `1/ω`.
pub const DEFAULT_DT: f64 = 1e-3;
/// Population allowed in the top [`MONITORED_LEVELS`] Fock levels.
pub const TRUNCATION_TOLERANCE: f64 = 1e-8;
pub const MONITORED_LEVELS: usize = 4;
/// Grid times at which positivity is spot-checked.
pub const PSD_SPOT_CHECKS: usize = 8;
pub const PSD_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HamiltonianMode {
    /// `ω a†a + (ω0/2) σz + g (σ + σ†)(a + a†)`.
    FullLab,
    /// `Δ a†a + g σx (a + a†)`.
    SlowQubit,
}

impl HamiltonianMode {
    pub fn hamiltonian(self, params: &ModelParams, space: FockSpace) -> Operator {
        match self {
            HamiltonianMode::FullLab => model::rabi_hamiltonian(params, space),
            HamiltonianMode::SlowQubit => model::slow_qubit_hamiltonian(params, space),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvolutionSpec {
    pub mode: HamiltonianMode,
    pub params: ModelParams,
    pub space: FockSpace,
    /// Strictly increasing sample times starting at 0.
    pub t_grid: Vec<f64>,
    pub initial: DensityMatrix,
    pub dt: f64,
}

impl EvolutionSpec {
    pub fn new(
        mode: HamiltonianMode,
        params: ModelParams,
        space: FockSpace,
        t_grid: Vec<f64>,
        initial: DensityMatrix,
    ) -> Result<Self> {
        let spec = Self {
            mode,
            params,
            space,
            t_grid,
            initial,
            dt: DEFAULT_DT,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_dt(mut self, dt: f64) -> Result<Self> {
        self.dt = dt;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        validate_grid(&self.t_grid)?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if self.initial.dim() != self.space.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim(),
                found: self.initial.dim(),
            });
        }
        // re-run the state checks in case the matrix was built unchecked
        DensityMatrix::new(self.initial.matrix().clone())?;
        Ok(())
    }
}

pub(crate) fn validate_grid(t_grid: &[f64]) -> Result<()> {
    match t_grid.first() {
        None => return Err(Error::InvalidParameter("time grid is empty".into())),
        Some(&t0) if t0 != 0.0 => {
            return Err(Error::InvalidParameter(format!(
                "time grid must start at 0, starts at {t0}"
            )))
        }
        _ => {}
    }
    if t_grid.windows(2).any(|w| !w[1].is_finite() || w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "time grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Uniform grid `0, step, 2·step, ...` up to `t_max` (inclusive within 1e-9).
pub fn uniform_grid(t_max: f64, step: f64) -> Vec<f64> {
    let n = ((t_max / step) + 1e-9).floor() as usize;
    (0..=n).map(|k| k as f64 * step).collect()
}

/// Sparse Lindblad generator `ρ ↦ −iH_eff ρ + h.c. + κ aρa†`.
pub(crate) struct Liouvillian {
    dim: usize,
    drift: CsrMatrix,
    jump: CsrMatrix,
    kappa: f64,
    herm: Vec<C64>,
    scratch: Vec<C64>,
}

impl Liouvillian {
    pub(crate) fn new(h: &Operator, kappa: f64, space: FockSpace) -> Self {
        let dim = space.dim();
        let drift = effective_drift(h, kappa, space).to_sparse();
        let jump = model::annihilation(space).to_sparse();
        Self {
            dim,
            drift,
            jump,
            kappa,
            herm: vec![C64::new(0.0, 0.0); dim * dim],
            scratch: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    /// Evaluated on the Hermitian part of `rho`. Round-off anti-Hermitian
    /// components would otherwise see only the jump term and grow like
    /// `exp(κ t n_max)`.
    pub(crate) fn apply(&mut self, rho: &[C64], out: &mut [C64]) {
        let d = self.dim;
        for j in 0..d {
            for i in 0..d {
                self.herm[i + j * d] = (rho[i + j * d] + rho[j + i * d].conj()) * 0.5;
            }
        }
        let rho = &self.herm[..];
        self.drift.mul_dense(rho, &mut self.scratch);
        let k = &self.scratch;
        for j in 0..d {
            for i in 0..d {
                out[i + j * d] = k[i + j * d] + k[j + i * d].conj();
            }
        }
        if self.kappa > 0.0 {
            self.jump.sandwich_add(rho, self.kappa, out);
        }
    }
}

/// `−i H_eff = −i H − (κ/2) a†a`.
fn effective_drift(h: &Operator, kappa: f64, space: FockSpace) -> Operator {
    h.scale(-C64::i())
        .add(&model::number(space).scale((-0.5 * kappa).into()))
}

/// `−i[H, ρ] + (κ/2)(2aρa† − a†aρ − ρa†a)`, evaluated densely.
pub fn lindblad_rhs(rho: &DensityMatrix, h: &Operator, kappa: f64) -> Result<DMatrix<C64>> {
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: rho.dim(),
        });
    }
    if !h.dim().is_multiple_of(2) || h.dim() < 4 {
        return Err(Error::InvalidParameter(format!(
            "dimension {} is not a qubit ⊗ Fock space",
            h.dim()
        )));
    }
    let space = FockSpace::new(h.dim() / 2 - 1)?;
    let a = model::annihilation(space).into_matrix();
    let ad = a.adjoint();
    let n = &ad * &a;
    let r = rho.matrix();
    let hm = h.matrix();
    let comm = hm * r - r * hm;
    let diss = (&a * r * &ad) * C64::new(2.0, 0.0) - &n * r - r * &n;
    Ok(comm * (-C64::i()) + diss * C64::new(0.5 * kappa, 0.0))
}

/// Run-level health indicators recorded at grid times.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EvolutionDiagnostics {
    pub steps: usize,
    pub max_trace_drift: f64,
    pub max_hermiticity_error: f64,
    /// Largest population seen in the top Fock levels.
    pub max_top_population: f64,
    /// Smallest eigenvalue over the positivity spot checks.
    pub min_eigenvalue: f64,
}

/// Population of the top [`MONITORED_LEVELS`] Fock levels.
pub fn top_population(populations: &[f64], space: FockSpace) -> f64 {
    let levels = MONITORED_LEVELS.min(space.mode_dim());
    let start = 2 * (space.mode_dim() - levels);
    populations[start..].iter().sum()
}

/// Integrates the master equation, handing each grid state to `observer`.
///
/// Fails with [`Error::Truncation`] when the top Fock levels gain more than
/// [`TRUNCATION_TOLERANCE`] population, and with [`Error::InvalidState`]
/// when a positivity spot check finds an eigenvalue below `−1e−8`.
pub fn evolve_with<F>(spec: &EvolutionSpec, mut observer: F) -> Result<EvolutionDiagnostics>
where
    F: FnMut(f64, &DensityMatrix) -> Result<()>,
{
    spec.validate()?;
    let space = spec.space;
    let d = space.dim();
    let h = spec.mode.hamiltonian(&spec.params, space);
    let mut gen = Liouvillian::new(&h, spec.params.kappa, space);
    let mut rk = Rk4::new(d * d);
    let mut rho: Vec<C64> = spec.initial.matrix().as_slice().to_vec();

    let grid = &spec.t_grid;
    let spot: Vec<usize> = (0..PSD_SPOT_CHECKS)
        .map(|k| k * (grid.len() - 1) / (PSD_SPOT_CHECKS - 1).max(1))
        .collect();
    let mut diag = EvolutionDiagnostics {
        min_eigenvalue: f64::INFINITY,
        ..Default::default()
    };

    for (idx, &t) in grid.iter().enumerate() {
        if idx > 0 {
            let (n, h_step) = substeps(grid[idx - 1], t, spec.dt);
            for _ in 0..n {
                rk.step(&mut rho, h_step, |y, out| gen.apply(y, out));
            }
            diag.steps += n;
        }
        let state = DensityMatrix::from_raw(DMatrix::from_column_slice(d, d, &rho));
        let pops = state.populations();
        let top = top_population(&pops, space);
        diag.max_top_population = diag.max_top_population.max(top);
        if top > TRUNCATION_TOLERANCE {
            return Err(Error::Truncation {
                n_max: space.n_max(),
                t,
                population: top,
            });
        }
        diag.max_trace_drift = diag.max_trace_drift.max((state.trace() - 1.0).abs());
        diag.max_hermiticity_error = diag.max_hermiticity_error.max(state.hermiticity_error());
        if spot.contains(&idx) {
            let ev = state.min_eigenvalue();
            diag.min_eigenvalue = diag.min_eigenvalue.min(ev);
            if ev < -PSD_TOLERANCE {
                return Err(Error::InvalidState(format!(
                    "density matrix lost positivity at t = {t} (eigenvalue {ev:.3e})"
                )));
            }
        }
        observer(t, &state)?;
    }
    Ok(diag)
}

/// Grid states from a full run.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub diagnostics: EvolutionDiagnostics,
}

/// Integrates and keeps every grid state. Prefer [`evolve_with`] for long grids.
pub fn evolve(spec: &EvolutionSpec) -> Result<Evolution> {
    let mut times = Vec::with_capacity(spec.t_grid.len());
    let mut states = Vec::with_capacity(spec.t_grid.len());
    let diagnostics = evolve_with(spec, |t, rho| {
        times.push(t);
        states.push(rho.clone());
        Ok(())
    })?;
    Ok(Evolution {
        times,
        states,
        diagnostics,
    })
}

#[derive(Debug, Clone)]
pub struct SteadyRun {
    pub rho: DensityMatrix,
    /// Time at which the residual first fell below tolerance.
    pub time: f64,
    /// `max |ρ'|` at convergence.
    pub residual: f64,
}

/// Time between residual checks in [`steady`].
pub const STEADY_CHECK_INTERVAL: f64 = 1.0;

/// Integrates from `spec.initial` until `max |ρ'| < epsilon`.
///
/// The time grid of `spec` is ignored.
pub fn steady(spec: &EvolutionSpec, epsilon: f64, max_time: f64) -> Result<SteadyRun> {
    spec.validate()?;
    if spec.params.kappa <= 0.0 {
        return Err(Error::InvalidParameter(
            "steady state requires kappa > 0".into(),
        ));
    }
    let space = spec.space;
    let d = space.dim();
    let h = spec.mode.hamiltonian(&spec.params, space);
    let mut gen = Liouvillian::new(&h, spec.params.kappa, space);
    let mut rk = Rk4::new(d * d);
    let mut rho: Vec<C64> = spec.initial.matrix().as_slice().to_vec();
    let mut deriv = vec![C64::new(0.0, 0.0); d * d];
    let (n, h_step) = substeps(0.0, STEADY_CHECK_INTERVAL, spec.dt);

    let mut t = 0.0;
    loop {
        gen.apply(&rho, &mut deriv);
        let residual = deriv.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if residual < epsilon {
            return Ok(SteadyRun {
                rho: DensityMatrix::from_raw(DMatrix::from_column_slice(d, d, &rho)),
                time: t,
                residual,
            });
        }
        if t >= max_time {
            return Err(Error::NonConvergence {
                t,
                residual,
                tolerance: epsilon,
            });
        }
        for _ in 0..n {
            rk.step(&mut rho, h_step, |y, out| gen.apply(y, out));
        }
        t += STEADY_CHECK_INTERVAL;
        let pops: Vec<f64> = (0..d).map(|i| rho[i + i * d].re).collect();
        let top = top_population(&pops, space);
        if top > TRUNCATION_TOLERANCE {
            return Err(Error::Truncation {
                n_max: space.n_max(),
                t,
                population: top,
            });
        }
    }
}
