//! Dissipative quantum Rabi model in the deep strong coupling regime.
//!
//! A qubit coupled to a single damped bosonic mode, solved three ways:
//!
//! * [`analytic`]: closed-form solution in the slow-qubit limit, where the
//!   qubit's `σx` is conserved and each `σx` sector carries a damped coherent
//!   state of the mode.
//! * [`mesolve`]: fixed-step RK4 integration of the Lindblad master equation
//!   on a truncated qubit ⊗ Fock space.
//! * [`mcwf`]: Monte Carlo wavefunction (quantum jump) unraveling of the same
//!   master equation, with seed-deterministic parallel ensembles.
//!
//! All quantities are dimensionless: `ħ = 1` and the mode frequency `ω = 1`.
//!
//! The basis of the truncated space is ordered as `index = 2n + s`, with
//! `s = 0` for `|g⟩` and `s = 1` for `|e⟩`.

pub mod analytic;
pub mod error;
pub mod mcwf;
pub mod mesolve;
pub mod model;
pub mod observables;
pub mod rk4;
pub mod sparse;
pub mod state;

pub use analytic::{AnalyticModel, AnalyticSnapshot, Parity, Sector, SteadyState};
pub use error::{Error, Result};
pub use mcwf::{EnsembleResult, McwfSpec, Trajectory, TrajectorySeed};
pub use mesolve::{EvolutionDiagnostics, EvolutionSpec, HamiltonianMode, SteadyRun};
pub use model::{FockSpace, ModelParams, Operator, Qubit};
pub use observables::ObservableSet;
pub use state::{DensityMatrix, PureState};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;
