//! Monte Carlo wavefunction (quantum jump) unraveling of the master equation.
//!
//! Each trajectory evolves `|ψ⟩` under `H_eff = H − i(κ/2) a†a` without
//! renormalization. A uniform threshold `r ∈ (0, 1)` is drawn up front; when
//! `‖ψ‖²` falls to `r` the crossing time is located by bisection on the RK4
//! step length to `|‖ψ‖² − r| < 1e−10`, the jump `ψ → aψ/‖aψ‖` is applied,
//! and a fresh threshold is drawn.
//!
//! Randomness: trajectory `i` of an ensemble with master seed `s` uses
//! `ChaCha8Rng::seed_from_u64(s)` on stream `i` (`set_stream(i)`). ChaCha is a
//! counter-based generator with a fixed, documented algorithm, so results do
//! not depend on the platform or on which thread runs which trajectory.
//!
//! Ensembles are reduced in fixed blocks of [`ENSEMBLE_BLOCK`] consecutive
//! trajectories, and the block statistics are merged pairwise in index order.
//! The reduction tree does not depend on scheduling, so the output is
//! bit-identical for any thread count.

use rand::distr::{Distribution, Open01};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesolve::{top_population, validate_grid, HamiltonianMode, DEFAULT_DT};
use crate::model::{self, FockSpace, ModelParams, Operator};
use crate::observables::{ObservableSet, DEFAULT_N_REPORT};
use crate::rk4::{substeps, Rk4};
use crate::sparse::CsrMatrix;
use crate::state::PureState;
use crate::C64;

pub const DEFAULT_N_TRAJ: usize = 1000;
/// Target accuracy of `‖ψ‖²` at a located jump.
pub const JUMP_NORM_TOLERANCE: f64 = 1e-10;
/// Largest relative norm loss allowed in a single step.
pub const MAX_STEP_NORM_DROP: f64 = 0.1;
/// Trajectories per reduction block.
pub const ENSEMBLE_BLOCK: usize = 16;

/// `H − i(κ/2) a†a`.
pub fn effective_hamiltonian(h: &Operator, kappa: f64, space: FockSpace) -> Result<Operator> {
    if h.dim() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: h.dim(),
        });
    }
    Ok(h.add(&model::number(space).scale(C64::new(0.0, -0.5 * kappa))))
}

#[derive(Debug, Clone)]
pub struct McwfSpec {
    pub mode: HamiltonianMode,
    pub params: ModelParams,
    pub space: FockSpace,
    pub t_grid: Vec<f64>,
    pub dt: f64,
    /// Chain probabilities are recorded for `n = 0..=n_report`.
    pub n_report: usize,
}

impl McwfSpec {
    pub fn new(
        mode: HamiltonianMode,
        params: ModelParams,
        space: FockSpace,
        t_grid: Vec<f64>,
    ) -> Result<Self> {
        let spec = Self {
            mode,
            params,
            space,
            t_grid,
            dt: DEFAULT_DT,
            n_report: DEFAULT_N_REPORT.min(space.n_max()),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_dt(mut self, dt: f64) -> Result<Self> {
        self.dt = dt;
        self.validate()?;
        Ok(self)
    }

    pub fn with_n_report(mut self, n_report: usize) -> Result<Self> {
        self.n_report = n_report;
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
        if self.n_report > self.space.n_max() {
            return Err(Error::InvalidParameter(format!(
                "n_report = {} exceeds n_max = {}",
                self.n_report,
                self.space.n_max()
            )));
        }
        Ok(())
    }

    /// Number of recorded channels per grid time.
    pub fn channels(&self) -> usize {
        3 + 2 * (self.n_report + 1)
    }
}

/// One recorded quantity of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    MeanPhoton,
    ProbGround,
    ProbExcited,
    ChainPlus(usize),
    ChainMinus(usize),
}

impl Channel {
    pub fn index(self, n_report: usize) -> usize {
        match self {
            Channel::MeanPhoton => 0,
            Channel::ProbGround => 1,
            Channel::ProbExcited => 2,
            Channel::ChainPlus(n) => {
                assert!(n <= n_report);
                3 + n
            }
            Channel::ChainMinus(n) => {
                assert!(n <= n_report);
                4 + n_report + n
            }
        }
    }
}

/// Counter-based seed of one trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TrajectorySeed {
    pub master: u64,
    pub index: u64,
}

impl TrajectorySeed {
    pub fn new(master: u64, index: u64) -> Self {
        Self { master, index }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(self.index);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpRecord {
    pub t: f64,
    /// `⟨Π⟩` of the normalized state just before and after the jump.
    pub parity_before: f64,
    pub parity_after: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub seed: TrajectorySeed,
    n_report: usize,
    /// Row-major `[time][channel]`.
    values: Vec<f64>,
    /// Population of the top Fock levels at each grid time.
    pub top_population: Vec<f64>,
    pub jumps: Vec<JumpRecord>,
}

impl Trajectory {
    pub fn value(&self, time_index: usize, channel: Channel) -> f64 {
        let c = 3 + 2 * (self.n_report + 1);
        self.values[time_index * c + channel.index(self.n_report)]
    }

    pub fn series(&self, channel: Channel) -> Vec<f64> {
        let c = 3 + 2 * (self.n_report + 1);
        let k = channel.index(self.n_report);
        self.values.iter().skip(k).step_by(c).copied().collect()
    }
}

/// Operators shared read-only by every trajectory of a run.
struct Propagator {
    dim: usize,
    drift: CsrMatrix,
    jump: CsrMatrix,
    decays: bool,
}

impl Propagator {
    fn new(spec: &McwfSpec) -> Result<Self> {
        let h = spec.mode.hamiltonian(&spec.params, spec.space);
        let h_eff = effective_hamiltonian(&h, spec.params.kappa, spec.space)?;
        Ok(Self {
            dim: spec.space.dim(),
            drift: h_eff.scale(-C64::i()).to_sparse(),
            jump: model::annihilation(spec.space).to_sparse(),
            decays: spec.params.kappa > 0.0,
        })
    }
}

fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

fn parity_expectation(v: &[C64], space: FockSpace) -> f64 {
    let n2 = norm_sqr(v);
    v.iter()
        .enumerate()
        .map(|(i, z)| space.parity_of(i) * z.norm_sqr())
        .sum::<f64>()
        / n2
}

struct Walker<'a> {
    prop: &'a Propagator,
    space: FockSpace,
    rk: Rk4,
    psi: Vec<C64>,
    trial: Vec<C64>,
    rng: ChaCha8Rng,
    threshold: f64,
    t: f64,
    jumps: Vec<JumpRecord>,
}

impl<'a> Walker<'a> {
    fn draw(rng: &mut ChaCha8Rng) -> f64 {
        Open01.sample(rng)
    }

    fn trial_step(&mut self, h: f64) -> f64 {
        self.trial.copy_from_slice(&self.psi);
        let drift = &self.prop.drift;
        self.rk
            .step(&mut self.trial, h, |y, out| drift.matvec(y, out));
        norm_sqr(&self.trial)
    }

    /// Advances by exactly `h`, resolving any jumps inside the interval.
    fn advance(&mut self, h: f64) -> Result<()> {
        let mut remaining = h;
        while remaining > 0.0 {
            let before = norm_sqr(&self.psi);
            let after = self.trial_step(remaining);
            let drop = (before - after) / before;
            if drop > MAX_STEP_NORM_DROP {
                return Err(Error::StepTooLarge { t: self.t, drop });
            }
            if !self.prop.decays || after > self.threshold {
                std::mem::swap(&mut self.psi, &mut self.trial);
                self.t += remaining;
                return Ok(());
            }
            // bracket the crossing: norm² > r at lo, ≤ r at hi
            let (mut lo, mut hi) = (0.0, remaining);
            let mut s = remaining;
            for _ in 0..200 {
                s = 0.5 * (lo + hi);
                if s <= lo || s >= hi {
                    break;
                }
                let n2 = self.trial_step(s);
                if (n2 - self.threshold).abs() < JUMP_NORM_TOLERANCE {
                    break;
                }
                if n2 > self.threshold {
                    lo = s;
                } else {
                    hi = s;
                }
            }
            self.trial_step(s);
            std::mem::swap(&mut self.psi, &mut self.trial);
            self.t += s;
            remaining -= s;
            self.jump()?;
        }
        Ok(())
    }

    fn jump(&mut self) -> Result<()> {
        let parity_before = parity_expectation(&self.psi, self.space);
        self.prop.jump.matvec(&self.psi, &mut self.trial);
        let n2 = norm_sqr(&self.trial);
        if n2.is_nan() || n2 <= 0.0 {
            return Err(Error::InvalidState(format!(
                "jump at t = {} acted on a state with no photons",
                self.t
            )));
        }
        let inv = 1.0 / n2.sqrt();
        for (p, x) in self.psi.iter_mut().zip(&self.trial) {
            *p = x * inv;
        }
        self.jumps.push(JumpRecord {
            t: self.t,
            parity_before,
            parity_after: parity_expectation(&self.psi, self.space),
        });
        self.threshold = Self::draw(&mut self.rng);
        Ok(())
    }

    fn record(&self, n_report: usize, out: &mut Vec<f64>, top: &mut Vec<f64>) -> Result<()> {
        let n2 = norm_sqr(&self.psi);
        let pops: Vec<f64> = self.psi.iter().map(|z| z.norm_sqr() / n2).collect();
        top.push(top_population(&pops, self.space));
        let o = ObservableSet::from_populations(&pops, 1.0, self.space)?;
        out.push(o.mean_photon);
        out.push(o.p_g);
        out.push(o.p_e);
        out.extend_from_slice(&o.chain_plus[..=n_report]);
        out.extend_from_slice(&o.chain_minus[..=n_report]);
        Ok(())
    }
}

fn run_with(
    prop: &Propagator,
    psi0: &PureState,
    spec: &McwfSpec,
    seed: TrajectorySeed,
) -> Result<Trajectory> {
    if psi0.dim() != prop.dim {
        return Err(Error::DimensionMismatch {
            expected: prop.dim,
            found: psi0.dim(),
        });
    }
    if (psi0.norm_sqr() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidState(
            "initial trajectory state must be normalized".into(),
        ));
    }
    let mut rng = seed.rng();
    let threshold = Walker::draw(&mut rng);
    let mut w = Walker {
        prop,
        space: spec.space,
        rk: Rk4::new(prop.dim),
        psi: psi0.amplitudes().as_slice().to_vec(),
        trial: vec![C64::new(0.0, 0.0); prop.dim],
        rng,
        threshold,
        t: 0.0,
        jumps: Vec::new(),
    };
    let mut values = Vec::with_capacity(spec.t_grid.len() * spec.channels());
    let mut top = Vec::with_capacity(spec.t_grid.len());
    for (idx, &t) in spec.t_grid.iter().enumerate() {
        if idx > 0 {
            let (n, h) = substeps(spec.t_grid[idx - 1], t, spec.dt);
            for _ in 0..n {
                w.advance(h)?;
            }
            // pin the clock to the grid to avoid drift from summed substeps
            w.t = t;
        }
        w.record(spec.n_report, &mut values, &mut top)?;
    }
    Ok(Trajectory {
        seed,
        n_report: spec.n_report,
        values,
        top_population: top,
        jumps: w.jumps,
    })
}

/// Runs a single trajectory from a normalized initial state.
pub fn run_trajectory(
    psi0: &PureState,
    spec: &McwfSpec,
    seed: TrajectorySeed,
) -> Result<Trajectory> {
    spec.validate()?;
    let prop = Propagator::new(spec)?;
    run_with(&prop, psi0, spec, seed)
}

/// Streaming mean and sum of squared deviations (Welford / Chan).
#[derive(Debug, Clone)]
struct Moments {
    count: usize,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Moments {
    fn empty(len: usize) -> Self {
        Self {
            count: 0,
            mean: vec![0.0; len],
            m2: vec![0.0; len],
        }
    }

    fn push(&mut self, x: &[f64]) {
        self.count += 1;
        let n = self.count as f64;
        for ((m, s), &v) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(x) {
            let d = v - *m;
            *m += d / n;
            *s += d * (v - *m);
        }
    }

    fn merge(a: &Moments, b: &Moments) -> Moments {
        if a.count == 0 {
            return b.clone();
        }
        if b.count == 0 {
            return a.clone();
        }
        let (na, nb) = (a.count as f64, b.count as f64);
        let n = na + nb;
        let mut out = Moments::empty(a.mean.len());
        out.count = a.count + b.count;
        for i in 0..a.mean.len() {
            let d = b.mean[i] - a.mean[i];
            out.mean[i] = a.mean[i] + d * nb / n;
            out.m2[i] = a.m2[i] + b.m2[i] + d * d * na * nb / n;
        }
        out
    }

    /// Pairwise merge in index order.
    fn merge_all(parts: &[Moments]) -> Moments {
        match parts.len() {
            0 => unreachable!("ensemble has at least one block"),
            1 => parts[0].clone(),
            n => {
                let (l, r) = parts.split_at(n / 2);
                Moments::merge(&Moments::merge_all(l), &Moments::merge_all(r))
            }
        }
    }
}

/// Trajectory-averaged observables with standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub t_grid: Vec<f64>,
    pub n_report: usize,
    pub n_traj: usize,
    pub master_seed: u64,
    /// Row-major `[time][channel]`.
    mean: Vec<f64>,
    stderr: Vec<f64>,
    /// Jumps per trajectory, in trajectory order.
    pub jump_counts: Vec<usize>,
    /// Largest ensemble-averaged population of the top Fock levels.
    pub max_top_population: f64,
}

impl EnsembleResult {
    fn channels(&self) -> usize {
        3 + 2 * (self.n_report + 1)
    }

    /// Standard errors need at least two trajectories; otherwise they are NaN.
    pub fn stderr_defined(&self) -> bool {
        self.n_traj >= 2
    }

    pub fn mean(&self, time_index: usize, channel: Channel) -> f64 {
        self.mean[time_index * self.channels() + channel.index(self.n_report)]
    }

    pub fn stderr(&self, time_index: usize, channel: Channel) -> f64 {
        self.stderr[time_index * self.channels() + channel.index(self.n_report)]
    }

    pub fn mean_series(&self, channel: Channel) -> Vec<f64> {
        (0..self.t_grid.len())
            .map(|k| self.mean(k, channel))
            .collect()
    }

    pub fn stderr_series(&self, channel: Channel) -> Vec<f64> {
        (0..self.t_grid.len())
            .map(|k| self.stderr(k, channel))
            .collect()
    }

    /// Allowed `|mean − reference|` for a consistency check against an exact
    /// value: `k_sigma` standard errors plus `3 (1 + |reference|) / n_traj`.
    ///
    /// The second term is the rule-of-three bound on jump events too rare to
    /// appear in the sample, where the empirical standard error is zero.
    pub fn consistency_band(
        &self,
        time_index: usize,
        channel: Channel,
        reference: f64,
        k_sigma: f64,
    ) -> f64 {
        let err = if self.stderr_defined() {
            self.stderr(time_index, channel)
        } else {
            0.0
        };
        k_sigma * err + 3.0 * (1.0 + reference.abs()) / self.n_traj as f64
    }

    pub fn total_jumps(&self) -> usize {
        self.jump_counts.iter().sum()
    }

    pub fn mean_jumps(&self) -> f64 {
        self.total_jumps() as f64 / self.n_traj as f64
    }
}

/// Runs `n_traj` trajectories seeded from `(master_seed, index)`.
///
/// Uses the ambient rayon pool; the result does not depend on its size.
pub fn run_ensemble(
    psi0: &PureState,
    spec: &McwfSpec,
    n_traj: usize,
    master_seed: u64,
) -> Result<EnsembleResult> {
    if n_traj == 0 {
        return Err(Error::InvalidParameter("n_traj must be at least 1".into()));
    }
    spec.validate()?;
    let prop = Propagator::new(spec)?;
    let width = spec.t_grid.len() * spec.channels();
    let blocks: Vec<(usize, usize)> = (0..n_traj)
        .step_by(ENSEMBLE_BLOCK)
        .map(|s| (s, (s + ENSEMBLE_BLOCK).min(n_traj)))
        .collect();

    let steps = spec.t_grid.len();
    let parts: Vec<(Moments, Vec<usize>, Vec<f64>)> = blocks
        .par_iter()
        .map(|&(start, end)| {
            let mut m = Moments::empty(width);
            let mut jumps = Vec::with_capacity(end - start);
            let mut top = vec![0.0; steps];
            for i in start..end {
                let seed = TrajectorySeed::new(master_seed, i as u64);
                let tr = run_with(&prop, psi0, spec, seed)?;
                m.push(&tr.values);
                jumps.push(tr.jumps.len());
                for (acc, p) in top.iter_mut().zip(&tr.top_population) {
                    *acc += p;
                }
            }
            Ok((m, jumps, top))
        })
        .collect::<Result<_>>()?;

    let mut top_sum = vec![0.0; steps];
    for (_, _, top) in &parts {
        for (acc, p) in top_sum.iter_mut().zip(top) {
            *acc += p;
        }
    }
    let max_top_population = top_sum
        .iter()
        .map(|p| p / n_traj as f64)
        .fold(0.0, f64::max);

    let moments: Vec<Moments> = parts.iter().map(|(m, _, _)| m.clone()).collect();
    let total = Moments::merge_all(&moments);
    let n = n_traj as f64;
    let stderr = total
        .m2
        .iter()
        .map(|s| {
            if n_traj < 2 {
                f64::NAN
            } else {
                (s / (n - 1.0) / n).sqrt()
            }
        })
        .collect();
    Ok(EnsembleResult {
        t_grid: spec.t_grid.clone(),
        n_report: spec.n_report,
        n_traj,
        master_seed,
        mean: total.mean,
        stderr,
        jump_counts: parts.into_iter().flat_map(|(_, j, _)| j).collect(),
        max_top_population,
    })
}
