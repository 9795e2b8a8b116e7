//! Truncated-Fock-space master-equation oracles.
//!
//! Two independent integrators verify the moment machinery: the reduced
//! two-mode generator (adjoint-converted from the moment-side master
//! equation) and the full qubit + photon + phonon Lindblad generator in the
//! bare basis. Both are represented as structured superoperators whose
//! application costs O(terms × dim²), never materializing the dim² × dim²
//! matrix.

pub mod evolve;
pub mod full;
pub mod moments;
pub mod ops;
pub mod reduced;
pub mod steady;

pub use evolve::{evolve_to_steady, EvolveOutcome};
pub use full::full_generator;
pub use moments::{fock_moments, FockMoments};
pub use ops::{BasisLayout, ModeOp, ProductTerm, Superoperator};
pub use reduced::reduced_generator;
pub use steady::{steady_state, SteadyOutcome};

use ndarray::Array2;
use ndarray_linalg::Eigh;
use num_complex::Complex64 as C64;

use crate::error::FockError;

/// Fock-space cutoffs and the cutoff-doubling convergence tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockConfig {
    /// Photon cutoff: states 0..n_a-1.
    pub n_a: usize,
    /// Phonon cutoff: states 0..n_b-1.
    pub n_b: usize,
    /// Relative change of reported observables under cutoff doubling below
    /// which the cutoffs are accepted.
    pub tol: f64,
    /// Doubling stops at these caps.
    pub max_n_a: usize,
    pub max_n_b: usize,
}

impl Default for FockConfig {
    fn default() -> Self {
        Self {
            n_a: 12,
            n_b: 12,
            tol: 1e-3,
            max_n_a: 48,
            max_n_b: 48,
        }
    }
}

impl FockConfig {
    pub fn validate(&self) -> Result<(), FockError> {
        let m = self.n_a.min(self.n_b);
        if m < 2 {
            return Err(FockError::CutoffTooSmall(m));
        }
        Ok(())
    }
}

/// A density matrix over a documented basis ordering (see [`BasisLayout`]).
/// Hermiticity and unit trace are monitored, not enforced.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub layout: BasisLayout,
    pub data: Array2<C64>,
}

impl DensityMatrix {
    pub fn zeros(layout: BasisLayout) -> Self {
        let d = layout.dim();
        Self {
            layout,
            data: Array2::zeros((d, d)),
        }
    }

    /// Vacuum photon mode ⊗ thermal phonon mode at occupation `nbar`
    /// (qubit in its ground state for the full layout). The default initial
    /// state for steady-state searches.
    pub fn vacuum_thermal(layout: BasisLayout, nbar: f64) -> Self {
        let mut rho = Self::zeros(layout);
        let n_b = layout.n_b();
        // thermal weights p(n) ∝ (nbar/(nbar+1))^n, renormalized over the cutoff
        let ratio = if nbar > 0.0 { nbar / (nbar + 1.0) } else { 0.0 };
        let mut weights: Vec<f64> = (0..n_b).map(|n| ratio.powi(n as i32)).collect();
        let norm: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= norm);
        for (nb, w) in weights.iter().enumerate() {
            let i = layout.flat(0, 0, nb);
            rho.data[(i, i)] = C64::new(*w, 0.0);
        }
        rho
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn trace(&self) -> C64 {
        self.data.diag().iter().sum()
    }

    /// Rescale so the trace is exactly one.
    pub fn normalize(&mut self) -> Result<(), FockError> {
        let tr = self.trace();
        if tr.norm() < 1e-300 {
            return Err(FockError::BadTrace(tr.norm()));
        }
        self.data.mapv_inplace(|v| v / tr);
        Ok(())
    }

    /// Max |ρ − ρ†| entry relative to the matrix scale.
    pub fn hermiticity_defect(&self) -> f64 {
        let scale = self
            .data
            .iter()
            .map(|v| v.norm())
            .fold(0.0f64, f64::max)
            .max(1e-300);
        let mut worst = 0.0f64;
        for r in 0..self.dim() {
            for c in r..self.dim() {
                worst = worst.max((self.data[(r, c)] - self.data[(c, r)].conj()).norm());
            }
        }
        worst / scale
    }

    /// Replace ρ by its Hermitian part (ρ + ρ†)/2.
    pub fn hermitize(&mut self) {
        let d = self.dim();
        for r in 0..d {
            for c in r..d {
                let avg = 0.5 * (self.data[(r, c)] + self.data[(c, r)].conj());
                self.data[(r, c)] = avg;
                self.data[(c, r)] = avg.conj();
            }
        }
    }

    /// Smallest eigenvalue of the Hermitian part. Positivity is reported,
    /// not enforced: the reduced generator is not in manifest Lindblad form,
    /// so small negative eigenvalues are physical diagnostics.
    pub fn min_eigenvalue(&self) -> Result<f64, FockError> {
        let d = self.dim();
        let mut h = self.data.clone();
        for r in 0..d {
            for c in 0..d {
                h[(r, c)] = 0.5 * (self.data[(r, c)] + self.data[(c, r)].conj());
            }
        }
        let (vals, _) = h
            .eigh(ndarray_linalg::UPLO::Lower)
            .map_err(|e| FockError::Linalg(e.to_string()))?;
        Ok(vals.iter().copied().fold(f64::INFINITY, f64::min))
    }
}
