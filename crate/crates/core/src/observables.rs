//! Observables extracted from density matrices and trajectory states.

use nalgebra::DMatrix;

use crate::analytic::Sector;
use crate::error::{Error, Result};
use crate::model::{FockSpace, Qubit};
use crate::state::{DensityMatrix, PureState};
use crate::C64;

/// Default number of chain entries reported in tables (`n ≤ 20`).
pub const DEFAULT_N_REPORT: usize = 20;

/// Anything with basis populations and a purity.
pub trait Measurable {
    fn dim(&self) -> usize;
    fn populations(&self) -> Vec<f64>;
    fn purity(&self) -> f64;
}

impl Measurable for DensityMatrix {
    fn dim(&self) -> usize {
        DensityMatrix::dim(self)
    }

    fn populations(&self) -> Vec<f64> {
        DensityMatrix::populations(self)
    }

    fn purity(&self) -> f64 {
        DensityMatrix::purity(self)
    }
}

impl Measurable for PureState {
    fn dim(&self) -> usize {
        PureState::dim(self)
    }

    fn populations(&self) -> Vec<f64> {
        PureState::populations(self)
    }

    fn purity(&self) -> f64 {
        // Tr ρ² of the normalized projector |ψ⟩⟨ψ|/⟨ψ|ψ⟩
        self.normalized().norm_sqr().powi(2)
    }
}

/// Every reported quantity at one instant.
///
/// Chain vectors cover the full truncated range `0..=n_max`;
/// `chain_plus[n]` holds `P(|g,n⟩)` for even `n` and `P(|e,n⟩)` for odd `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSet {
    pub mean_photon: f64,
    pub p_g: f64,
    pub p_e: f64,
    pub purity: f64,
    pub photon_dist: Vec<f64>,
    pub chain_plus: Vec<f64>,
    pub chain_minus: Vec<f64>,
    pub parity_expectation: f64,
}

impl ObservableSet {
    /// Builds the set from diagonal populations in the fixed basis order.
    pub fn from_populations(pops: &[f64], purity: f64, space: FockSpace) -> Result<Self> {
        if pops.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: pops.len(),
            });
        }
        let levels = space.mode_dim();
        let mut photon_dist = vec![0.0; levels];
        let mut chain_plus = vec![0.0; levels];
        let mut chain_minus = vec![0.0; levels];
        let (mut p_g, mut p_e) = (0.0, 0.0);
        for n in 0..levels {
            let g = pops[space.index(Qubit::Ground, n)];
            let e = pops[space.index(Qubit::Excited, n)];
            p_g += g;
            p_e += e;
            photon_dist[n] = g + e;
            if n % 2 == 0 {
                chain_plus[n] = g;
                chain_minus[n] = e;
            } else {
                chain_plus[n] = e;
                chain_minus[n] = g;
            }
        }
        let mean_photon = photon_dist
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum();
        let parity_expectation = chain_plus
            .iter()
            .zip(&chain_minus)
            .map(|(p, m)| p - m)
            .sum();
        Ok(Self {
            mean_photon,
            p_g,
            p_e,
            purity,
            photon_dist,
            chain_plus,
            chain_minus,
            parity_expectation,
        })
    }

    /// Total probability in the `−1` parity chain.
    pub fn chain_minus_total(&self) -> f64 {
        self.chain_minus.iter().sum()
    }
}

pub fn measure<S: Measurable>(state: &S, space: FockSpace) -> Result<ObservableSet> {
    if state.dim() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: state.dim(),
        });
    }
    ObservableSet::from_populations(&state.populations(), state.purity(), space)
}

/// Displacement `D(α) = exp(α a† − α* a)` on `levels` Fock states.
pub fn displacement(levels: usize, alpha: C64) -> DMatrix<C64> {
    let mut gen = DMatrix::<C64>::zeros(levels, levels);
    for n in 1..levels {
        let s = (n as f64).sqrt();
        // a|n⟩ = √n |n−1⟩
        gen[(n - 1, n)] = -alpha.conj() * s;
        gen[(n, n - 1)] = alpha * s;
    }
    gen.exp()
}

/// Mode operator `⟨a|ρ|b⟩` for a `σx` sector `(a, b)`.
pub fn sigma_x_block(
    rho: &DensityMatrix,
    space: FockSpace,
    sector: Sector,
) -> Result<DMatrix<C64>> {
    if rho.dim() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: rho.dim(),
        });
    }
    let (a, b) = sector.signs();
    let levels = space.mode_dim();
    let m = rho.matrix();
    Ok(DMatrix::from_fn(levels, levels, |n, k| {
        let gg = m[(space.index(Qubit::Ground, n), space.index(Qubit::Ground, k))];
        let ge = m[(
            space.index(Qubit::Ground, n),
            space.index(Qubit::Excited, k),
        )];
        let eg = m[(
            space.index(Qubit::Excited, n),
            space.index(Qubit::Ground, k),
        )];
        let ee = m[(
            space.index(Qubit::Excited, n),
            space.index(Qubit::Excited, k),
        )];
        (gg + ge * b + eg * a + ee * (a * b)) * 0.5
    }))
}

/// `Tr[ρ_mode D(α)]` for a mode operator.
pub fn mode_char_function(mode_op: &DMatrix<C64>, alpha: C64) -> C64 {
    let d = displacement(mode_op.nrows(), alpha);
    (mode_op * d).trace()
}

/// `Tr[ρ (1 ⊗ D(α))]`.
///
/// Logs a warning when `|α|² > n_max / 4`, where the truncated displacement
/// starts to feel the cutoff.
pub fn char_function(rho: &DensityMatrix, space: FockSpace, alpha: C64) -> Result<C64> {
    if rho.dim() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: rho.dim(),
        });
    }
    if alpha.norm_sqr() > space.n_max() as f64 / 4.0 {
        log::warn!(
            "|alpha|^2 = {} exceeds n_max/4 = {}; characteristic function may be truncation-limited",
            alpha.norm_sqr(),
            space.n_max() as f64 / 4.0
        );
    }
    let d = displacement(space.mode_dim(), alpha);
    let m = rho.matrix();
    let mut acc = C64::new(0.0, 0.0);
    for q in [Qubit::Ground, Qubit::Excited] {
        for n in 0..space.mode_dim() {
            for k in 0..space.mode_dim() {
                acc += m[(space.index(q, k), space.index(q, n))] * d[(n, k)];
            }
        }
    }
    Ok(acc)
}

/// `½ ‖a − b‖₁` from the eigenvalues of the Hermitian difference.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let diff = a.matrix() - b.matrix();
    let herm = (&diff + diff.adjoint()) * C64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen().eigenvalues;
    Ok(0.5 * eig.iter().map(|x| x.abs()).sum::<f64>())
}
