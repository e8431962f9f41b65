//! Mixed and pure states on the truncated qubit ⊗ Fock space.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{FockSpace, Qubit};
use crate::C64;

const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-8;

/// Hermitian, unit-trace density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates Hermiticity (1e-10) and unit trace (1e-8).
    ///
    /// Positivity is not checked here; see [`DensityMatrix::min_eigenvalue`].
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let rho = Self { matrix };
        let herm = rho.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "density matrix is not Hermitian (max |ρ − ρ†| = {herm:.3e})"
            )));
        }
        let tr = rho.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "density matrix trace is {tr}, expected 1"
            )));
        }
        Ok(rho)
    }

    pub(crate) fn from_raw(matrix: DMatrix<C64>) -> Self {
        Self { matrix }
    }

    /// Projector onto `|q, n⟩`.
    pub fn basis(space: FockSpace, qubit: Qubit, n: usize) -> Self {
        PureState::basis(space, qubit, n).to_density()
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

    /// Real part of the trace.
    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).sum()
    }

    /// `Tr ρ²`, computed as the Frobenius norm squared (exact for Hermitian ρ).
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

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

    /// Diagonal populations in the fixed basis order.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        herm.symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// State vector of a single trajectory.
///
/// Between jumps the vector is propagated without renormalization, so its
/// norm may be below one; observables are always evaluated on the
/// normalized copy.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: DVector<C64>,
}

impl PureState {
    /// Normalizes the given amplitudes.
    pub fn new(amplitudes: DVector<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::InvalidState("state vector has zero norm".into()));
        }
        Ok(Self {
            amplitudes: amplitudes / C64::new(norm, 0.0),
        })
    }

    pub fn basis(space: FockSpace, qubit: Qubit, n: usize) -> Self {
        let mut v = DVector::zeros(space.dim());
        v[space.index(qubit, n)] = C64::new(1.0, 0.0);
        Self { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    pub fn normalized(&self) -> Self {
        let n = self.amplitudes.norm();
        Self {
            amplitudes: &self.amplitudes / C64::new(n, 0.0),
        }
    }

    pub fn populations(&self) -> Vec<f64> {
        let n2 = self.norm_sqr();
        self.amplitudes.iter().map(|z| z.norm_sqr() / n2).collect()
    }

    pub fn to_density(&self) -> DensityMatrix {
        let psi = self.normalized();
        DensityMatrix::from_raw(&psi.amplitudes * psi.amplitudes.adjoint())
    }
}
