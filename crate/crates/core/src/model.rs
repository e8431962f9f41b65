//! Parameters, truncated Hilbert space and operator builders.
//!
//! The Hilbert space is qubit ⊗ Fock, truncated at `n_max` photons. Basis
//! vectors are ordered photon-major with the qubit as the fast index:
//! `|g,0⟩, |e,0⟩, |g,1⟩, |e,1⟩, ...`, i.e. `index = 2n + s`. Parity
//! projectors are therefore stride-2 masks over the diagonal.
//!
//! Truncation makes `[a, a†] = 1` fail on the last Fock row, where
//! `⟨n_max|[a, a†]|n_max⟩ = -n_max`. Every solver monitors the population of
//! the top levels so that this row never matters.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;
use crate::C64;

/// Physical parameters in units where `ω = 1` is the natural choice.
///
/// The detuning `Δ = ω − ω0` is derived on demand so it can never drift out
/// of sync with the frequencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub omega: f64,
    pub omega0: f64,
    pub g: f64,
    pub kappa: f64,
}

impl ModelParams {
    pub fn new(omega: f64, omega0: f64, g: f64, kappa: f64) -> Result<Self> {
        let p = Self {
            omega,
            omega0,
            g,
            kappa,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters with `ω = 1` and `ω0 = 1 − Δ`.
    pub fn from_detuning(g: f64, delta: f64, kappa: f64) -> Result<Self> {
        Self::new(1.0, 1.0 - delta, g, kappa)
    }

    pub fn delta(&self) -> f64 {
        self.omega - self.omega0
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.omega, self.omega0, self.g, self.kappa]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("parameters must be finite".into()));
        }
        if self.omega <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "omega must be positive, got {}",
                self.omega
            )));
        }
        if self.omega0 < 0.0 || self.omega0 > self.omega {
            return Err(Error::InvalidParameter(format!(
                "omega0 must lie in [0, omega], got {} (omega = {})",
                self.omega0, self.omega
            )));
        }
        // g = 0 is admitted as the decoupled reference case.
        if self.g < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "g must be non-negative, got {}",
                self.g
            )));
        }
        if self.kappa < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "kappa must be non-negative, got {}",
                self.kappa
            )));
        }
        Ok(())
    }
}

/// Qubit level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Qubit {
    Ground,
    Excited,
}

impl Qubit {
    /// Index offset within a photon-number block.
    pub fn offset(self) -> usize {
        match self {
            Qubit::Ground => 0,
            Qubit::Excited => 1,
        }
    }

    /// Eigenvalue of `σz`.
    pub fn sigma_z(self) -> f64 {
        match self {
            Qubit::Ground => -1.0,
            Qubit::Excited => 1.0,
        }
    }
}

/// Truncated qubit ⊗ Fock space keeping photon numbers `0..=n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    n_max: usize,
}

impl FockSpace {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidParameter("n_max must be at least 1".into()));
        }
        Ok(Self { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Number of Fock levels, `n_max + 1`.
    pub fn mode_dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1)
    }

    pub fn index(&self, qubit: Qubit, n: usize) -> usize {
        debug_assert!(n <= self.n_max);
        2 * n + qubit.offset()
    }

    pub fn split(&self, index: usize) -> (Qubit, usize) {
        debug_assert!(index < self.dim());
        let qubit = if index.is_multiple_of(2) {
            Qubit::Ground
        } else {
            Qubit::Excited
        };
        (qubit, index / 2)
    }

    /// Eigenvalue of `Π = −σz (−1)^{a†a}` on a basis vector.
    ///
    /// `{|g,2N⟩, |e,2N+1⟩}` form the `+1` chain, `{|e,2N⟩, |g,2N+1⟩}` the `−1` chain.
    pub fn parity_of(&self, index: usize) -> f64 {
        let (q, n) = self.split(index);
        let photon_sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        -q.sigma_z() * photon_sign
    }
}

/// Dense square operator on a [`FockSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    matrix: DMatrix<C64>,
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    pub fn dagger(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn mul(&self, other: &Operator) -> Self {
        Self {
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn add(&self, other: &Operator) -> Self {
        Self {
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            matrix: &self.matrix * factor,
        }
    }

    pub fn commutator(&self, other: &Operator) -> Self {
        Self {
            matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix,
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry modulus of `A − A†`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut err = 0.0_f64;
        for j in 0..n {
            for i in 0..=j {
                err = err.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        err
    }

    pub fn to_sparse(&self) -> CsrMatrix {
        CsrMatrix::from_dense(&self.matrix)
    }
}

fn build(space: FockSpace, mut entry: impl FnMut(usize, usize) -> f64) -> Operator {
    let dim = space.dim();
    Operator {
        matrix: DMatrix::from_fn(dim, dim, |i, j| C64::new(entry(i, j), 0.0)),
    }
}

/// Mode annihilation operator `a ⊗ 1`.
pub fn annihilation(space: FockSpace) -> Operator {
    build(space, |i, j| {
        let (qi, ni) = space.split(i);
        let (qj, nj) = space.split(j);
        if qi == qj && nj == ni + 1 {
            (nj as f64).sqrt()
        } else {
            0.0
        }
    })
}

pub fn creation(space: FockSpace) -> Operator {
    annihilation(space).dagger()
}

/// Photon number `a†a`, built directly so the top level carries `n_max`.
pub fn number(space: FockSpace) -> Operator {
    build(
        space,
        |i, j| if i == j { space.split(i).1 as f64 } else { 0.0 },
    )
}

pub fn pauli_z(space: FockSpace) -> Operator {
    build(space, |i, j| {
        if i == j {
            space.split(i).0.sigma_z()
        } else {
            0.0
        }
    })
}

/// Qubit lowering `σ = |g⟩⟨e|`.
pub fn lowering(space: FockSpace) -> Operator {
    build(space, |i, j| {
        let (qi, ni) = space.split(i);
        let (qj, nj) = space.split(j);
        if ni == nj && qi == Qubit::Ground && qj == Qubit::Excited {
            1.0
        } else {
            0.0
        }
    })
}

pub fn raising(space: FockSpace) -> Operator {
    lowering(space).dagger()
}

/// `σx = σ + σ†`.
pub fn pauli_x(space: FockSpace) -> Operator {
    lowering(space).add(&raising(space))
}

/// Quantum Rabi Hamiltonian `ω a†a + (ω0/2) σz + g (σ + σ†)(a + a†)`.
pub fn rabi_hamiltonian(params: &ModelParams, space: FockSpace) -> Operator {
    let coupling = pauli_x(space).mul(&annihilation(space).add(&creation(space)));
    number(space)
        .scale(params.omega.into())
        .add(&pauli_z(space).scale((0.5 * params.omega0).into()))
        .add(&coupling.scale(params.g.into()))
}

/// Slow-qubit Hamiltonian `Δ a†a + g σx (a + a†)`.
///
/// This is the interaction-picture Hamiltonian with the `e^{±iω0 t}` phases
/// frozen at one, valid while `ω0 t ≪ 1`. It commutes with `σx`.
pub fn slow_qubit_hamiltonian(params: &ModelParams, space: FockSpace) -> Operator {
    let coupling = pauli_x(space).mul(&annihilation(space).add(&creation(space)));
    number(space)
        .scale(params.delta().into())
        .add(&coupling.scale(params.g.into()))
}

/// Generator `H0 = ω0 (σz/2 + a†a)` of the interaction-picture frame.
///
/// `U(t) = exp(i H0 t)` is diagonal in the Fock basis, so populations and every
/// diagonal observable are identical in the lab and interaction frames.
pub fn frame_generator(params: &ModelParams, space: FockSpace) -> Operator {
    pauli_z(space)
        .scale(0.5.into())
        .add(&number(space))
        .scale(params.omega0.into())
}

/// Parity `Π = −σz (−1)^{a†a}`.
pub fn parity_operator(space: FockSpace) -> Operator {
    build(space, |i, j| if i == j { space.parity_of(i) } else { 0.0 })
}
