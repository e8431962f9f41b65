//! Closed-form dynamics of the dissipative slow-qubit model.
//!
//! In the slow-qubit limit the Hamiltonian `Δ a†a + g σx (a + a†)` conserves
//! `σx`. Starting from `|g,0⟩ = (|+,0⟩ + |−,0⟩)/√2` with zero-temperature mode
//! damping, each `σx` sector carries a damped coherent state:
//!
//! ```text
//! ρ±± = ½ |±β⟩⟨±β|,     ρ±∓ = ½ F e^{2|β|²} |±β⟩⟨∓β|
//! β(t) = (i g / z)(e^{−z t} − 1),   z = κ/2 + iΔ
//! F(t) = exp{−(2g²/|z|²)[κ t + (2/g) Im(z* β)]}
//! ```
//!
//! `β` solves `β' = −z β − i g`, and `F` multiplies the sector coherences.
//! Starting from `|e,0⟩` only flips the sign of the coherences (`F → −F`).
//!
//! Numerics: the coherence weight `F e^{2|β|²}` is a ratio of two quantities
//! spanning many orders of magnitude, so it is evaluated as
//! `exp(ln F + 2|β|²)`. Poisson weights `e^{−λ} λⁿ/n!` are evaluated in log
//! space.
//!
//! The chain probabilities are implemented in the product form
//! `P⁽⁺⁾ₙ = (|β|^{2n}/n!) P_{g,0}`, `P⁽⁻⁾ₙ = (|β|^{2n}/n!) P_{e,0}`. The Poisson
//! normalization `e^{−|β|²}` is carried by `P_{g/e,0}`, so
//! `P⁽⁺⁾ₙ + P⁽⁻⁾ₙ = Pₙ` termwise.

use std::sync::OnceLock;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::{FockSpace, ModelParams, Qubit};
use crate::state::DensityMatrix;
use crate::C64;

/// Largest Poisson tail mass tolerated when materializing a density matrix.
pub const TAIL_TOLERANCE: f64 = 1e-10;

/// Parity chain, the eigenvalue of `Π = −σz (−1)^{a†a}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Plus,
    Minus,
}

/// Block of the density matrix in the `σx` eigenbasis `|±⟩ = (|g⟩ ± |e⟩)/√2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sector {
    PlusPlus,
    MinusMinus,
    PlusMinus,
    MinusPlus,
}

impl Sector {
    /// Signs of the row and column `σx` eigenvalues.
    pub fn signs(self) -> (f64, f64) {
        match self {
            Sector::PlusPlus => (1.0, 1.0),
            Sector::MinusMinus => (-1.0, -1.0),
            Sector::PlusMinus => (1.0, -1.0),
            Sector::MinusPlus => (-1.0, 1.0),
        }
    }
}

/// Slow-qubit model with a fixed initial state `|q, 0⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticModel {
    g: f64,
    delta: f64,
    kappa: f64,
    initial: Qubit,
}

impl AnalyticModel {
    /// Rejects `κ = Δ = 0`, where `β(t)` grows without bound.
    pub fn new(g: f64, delta: f64, kappa: f64, initial: Qubit) -> Result<Self> {
        if !(g.is_finite() && delta.is_finite() && kappa.is_finite()) {
            return Err(Error::InvalidParameter("parameters must be finite".into()));
        }
        if g < 0.0 || kappa < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "g and kappa must be non-negative (g = {g}, kappa = {kappa})"
            )));
        }
        if delta == 0.0 && kappa == 0.0 {
            return Err(Error::InvalidParameter(
                "z = κ/2 + iΔ vanishes: the undamped resonant case has no bounded solution".into(),
            ));
        }
        Ok(Self {
            g,
            delta,
            kappa,
            initial,
        })
    }

    pub fn from_params(params: &ModelParams, initial: Qubit) -> Result<Self> {
        Self::new(params.g, params.delta(), params.kappa, initial)
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn initial(&self) -> Qubit {
        self.initial
    }

    /// `z = κ/2 + iΔ`.
    pub fn z(&self) -> C64 {
        C64::new(0.5 * self.kappa, self.delta)
    }

    /// `(i/z)(e^{−zt} − 1)`, i.e. `β/g`.
    fn unit_amplitude(&self, t: f64) -> C64 {
        let z = self.z();
        C64::i() / z * ((-z * t).exp() - 1.0)
    }

    /// Coherent amplitude `β(t)`.
    pub fn beta(&self, t: f64) -> C64 {
        self.unit_amplitude(t) * self.g
    }

    /// `ln F(t)`.
    pub fn log_decoherence(&self, t: f64) -> f64 {
        let z = self.z();
        let b = self.unit_amplitude(t);
        // (2/g) Im(z* β) = 2 Im(z* b), safe at g = 0
        -2.0 * self.g * self.g / z.norm_sqr() * (self.kappa * t + 2.0 * (z.conj() * b).im)
    }

    /// Decoherence function `F(t)`.
    pub fn decoherence(&self, t: f64) -> f64 {
        self.log_decoherence(t).exp()
    }

    pub fn snapshot(&self, t: f64) -> AnalyticSnapshot {
        AnalyticSnapshot {
            t,
            beta: self.beta(t),
            f: self.decoherence(t),
            log_f: self.log_decoherence(t),
            sign: match self.initial {
                Qubit::Ground => 1.0,
                Qubit::Excited => -1.0,
            },
        }
    }

    pub fn joint_prob(&self, t: f64, level: Qubit, n: usize) -> f64 {
        self.snapshot(t).joint_prob(level, n)
    }

    pub fn purity(&self, t: f64) -> f64 {
        self.snapshot(t).purity()
    }

    /// `(P_g, P_e)`.
    pub fn qubit_populations(&self, t: f64) -> (f64, f64) {
        self.snapshot(t).qubit_populations()
    }

    pub fn photon_dist(&self, t: f64, n: usize) -> f64 {
        self.snapshot(t).photon_dist(n)
    }

    pub fn mean_photon(&self, t: f64) -> f64 {
        self.snapshot(t).mean_photon()
    }

    pub fn chain_prob(&self, t: f64, parity: Parity, n: usize) -> f64 {
        self.snapshot(t).chain_prob(parity, n)
    }

    /// Long-time limit, an equal mixture of `|+, β_S⟩` and `|−, −β_S⟩`.
    pub fn steady_state(&self) -> Result<SteadyState> {
        if self.kappa <= 0.0 {
            return Err(Error::InvalidParameter(
                "steady state requires kappa > 0".into(),
            ));
        }
        let beta = -C64::i() * self.g / self.z();
        Ok(SteadyState {
            beta,
            mean_photon: beta.norm_sqr(),
            energy: self.delta * beta.norm_sqr() + 2.0 * self.g * beta.re,
        })
    }

    /// Characteristic function `Tr[ρ_sector(t) D(α)]` of one `σx` block.
    pub fn char_function(&self, t: f64, alpha: C64, sector: Sector) -> C64 {
        let snap = self.snapshot(t);
        let beta = snap.beta;
        let (row, col) = sector.signs();
        // ⟨col·β| D(α) |row·β⟩ carries the exponent below; the prefactor is
        // ½ on the diagonal blocks and ½ (±F) off-diagonal.
        let gauss = -0.5 * alpha.norm_sqr();
        let exponent = C64::new(gauss, 0.0) - beta * alpha.conj() * row + beta.conj() * alpha * col;
        let prefactor = if row == col {
            0.5
        } else {
            0.5 * snap.sign * snap.f
        };
        exponent.exp() * prefactor
    }

    /// Full qubit ⊗ mode density matrix at time `t`.
    ///
    /// Fails with [`Error::Truncation`] when the Poisson tail of `|β(t)|²`
    /// beyond `n_max` exceeds [`TAIL_TOLERANCE`].
    pub fn density_matrix(&self, t: f64, space: FockSpace) -> Result<DensityMatrix> {
        let snap = self.snapshot(t);
        let retained: f64 = (0..=space.n_max()).map(|n| snap.photon_dist(n)).sum();
        let tail = (1.0 - retained).max(0.0);
        if tail > TAIL_TOLERANCE {
            return Err(Error::Truncation {
                n_max: space.n_max(),
                t,
                population: tail,
            });
        }
        let plus = coherent_amplitudes(snap.beta, space.n_max());
        let minus = coherent_amplitudes(-snap.beta, space.n_max());
        let w = snap.coherence_weight();
        let blocks = [
            (1.0, 1.0, &plus, &plus, 0.5),
            (-1.0, -1.0, &minus, &minus, 0.5),
            (1.0, -1.0, &plus, &minus, 0.5 * w),
            (-1.0, 1.0, &minus, &plus, 0.5 * w),
        ];
        let dim = space.dim();
        let mut m = DMatrix::<C64>::zeros(dim, dim);
        for j in 0..dim {
            let (qj, nj) = space.split(j);
            for i in 0..dim {
                let (qi, ni) = space.split(i);
                let mut acc = C64::new(0.0, 0.0);
                for &(a, b, ket, bra, weight) in &blocks {
                    // ⟨s|±⟩ = ±1/√2 only for (e, −)
                    let ui = if qi == Qubit::Excited { a } else { 1.0 };
                    let uj = if qj == Qubit::Excited { b } else { 1.0 };
                    acc += ket[ni] * bra[nj].conj() * (0.5 * ui * uj * weight);
                }
                m[(i, j)] = acc;
            }
        }
        Ok(DensityMatrix::from_raw(m))
    }
}

/// `(β(t), F(t))` at a single time, with every closed-form observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticSnapshot {
    pub t: f64,
    pub beta: C64,
    pub f: f64,
    pub log_f: f64,
    /// `+1` for an initial `|g,0⟩`, `−1` for `|e,0⟩`.
    pub sign: f64,
}

impl AnalyticSnapshot {
    /// Signed sector-coherence weight `±F e^{2|β|²}`, in `[−1, 1]`.
    pub fn coherence_weight(&self) -> f64 {
        self.sign * (self.log_f + 2.0 * self.beta.norm_sqr()).exp()
    }

    pub fn mean_photon(&self) -> f64 {
        self.beta.norm_sqr()
    }

    /// Poisson weight with mean `|β|²`.
    pub fn photon_dist(&self, n: usize) -> f64 {
        poisson(self.beta.norm_sqr(), n)
    }

    /// `P_{g/e,n} = ½ e^{−|β|²} |β|^{2n}/n! [1 ± (−1)ⁿ F e^{2|β|²}]`.
    pub fn joint_prob(&self, level: Qubit, n: usize) -> f64 {
        let alternating = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        let level_sign = match level {
            Qubit::Ground => 1.0,
            Qubit::Excited => -1.0,
        };
        0.5 * self.photon_dist(n) * (1.0 + level_sign * alternating * self.coherence_weight())
    }

    /// `μ = ½ [1 + F² e^{4|β|²}]`.
    pub fn purity(&self) -> f64 {
        let w = self.coherence_weight();
        0.5 * (1.0 + w * w)
    }

    /// `P_{g/e} = ½ (1 ± F)`, with `F → −F` for an excited start.
    pub fn qubit_populations(&self) -> (f64, f64) {
        let sf = self.sign * self.f;
        (0.5 * (1.0 + sf), 0.5 * (1.0 - sf))
    }

    pub fn chain_prob(&self, parity: Parity, n: usize) -> f64 {
        let anchor = match parity {
            Parity::Plus => self.joint_prob(Qubit::Ground, 0),
            Parity::Minus => self.joint_prob(Qubit::Excited, 0),
        };
        let lam = self.beta.norm_sqr();
        let growth = if n == 0 {
            1.0
        } else if lam == 0.0 {
            0.0
        } else {
            (n as f64 * lam.ln() - ln_factorial(n)).exp()
        };
        growth * anchor
    }
}

/// Fixed point of the damped coherent amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    /// `β_S = −i g / z`.
    pub beta: C64,
    /// `|β_S|² = 4g²/(κ² + 4Δ²)`.
    pub mean_photon: f64,
    /// `Δ|β_S|² + g(β_S + β_S*)`, shared by both mixture components.
    pub energy: f64,
}

/// `ln n!`, tabulated below 1024 and from Stirling's series above.
pub fn ln_factorial(n: usize) -> f64 {
    const TABLE: usize = 1024;
    static CACHE: OnceLock<Vec<f64>> = OnceLock::new();
    if n < TABLE {
        let table = CACHE.get_or_init(|| {
            let mut v = Vec::with_capacity(TABLE);
            let mut acc = 0.0;
            v.push(0.0);
            for k in 1..TABLE {
                acc += (k as f64).ln();
                v.push(acc);
            }
            v
        });
        return table[n];
    }
    let x = n as f64 + 1.0;
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x.powi(3))
}

/// `e^{−λ} λⁿ / n!` evaluated in log space.
pub fn poisson(lambda: f64, n: usize) -> f64 {
    if lambda == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    (-lambda + n as f64 * lambda.ln() - ln_factorial(n)).exp()
}

/// Fock amplitudes `e^{−|β|²/2} βⁿ/√n!` of `|β⟩` for `n = 0..=n_max`.
pub fn coherent_amplitudes(beta: C64, n_max: usize) -> Vec<C64> {
    let r2 = beta.norm_sqr();
    if r2 == 0.0 {
        let mut v = vec![C64::new(0.0, 0.0); n_max + 1];
        v[0] = C64::new(1.0, 0.0);
        return v;
    }
    let ln_r = 0.5 * r2.ln();
    let phase = beta.arg();
    (0..=n_max)
        .map(|n| {
            let ln_mag = -0.5 * r2 + n as f64 * ln_r - 0.5 * ln_factorial(n);
            C64::from_polar(ln_mag.exp(), n as f64 * phase)
        })
        .collect()
}
