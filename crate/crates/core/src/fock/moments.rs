//! Normally-ordered moments of a truncated-Fock density matrix.

use num_complex::Complex64 as C64;

use crate::error::FockError;
use crate::fock::DensityMatrix;
use crate::moments::{MomentBasis, MomentVector};

/// Occupation threshold on the top two Fock levels of either mode above
/// which the state is flagged as cutoff-contaminated.
pub const CONTAMINATION_THRESHOLD: f64 = 1e-6;

/// A moment vector extracted from a density matrix, with a cutoff-
/// contamination flag (a warning-carrying result, not a failure).
#[derive(Debug, Clone)]
pub struct FockMoments {
    pub moments: MomentVector,
    pub contaminated: bool,
    /// Population in the top two photon levels.
    pub top_occupation_a: f64,
    /// Population in the top two phonon levels.
    pub top_occupation_b: f64,
}

impl FockMoments {
    /// Worst of the two per-mode boundary occupations.
    pub fn top_occupation(&self) -> f64 {
        self.top_occupation_a.max(self.top_occupation_b)
    }
}

/// Falling factorial n (n−1) ⋯ (n−r+1).
fn falling(n: usize, r: usize) -> f64 {
    (0..r).map(|i| (n - i) as f64).product()
}

/// Exact normally-ordered expectations ⟨a†ʲ aᵏ b†ˡ bᵐ⟩ = Tr(ρ a†ʲaᵏb†ˡbᵐ)
/// over the truncated space, for every index in `basis`. The qubit of the
/// full layout, if present, is traced out. Requires Tr ρ = 1.
pub fn fock_moments(rho: &DensityMatrix, basis: &MomentBasis) -> Result<FockMoments, FockError> {
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-6 || tr.im.abs() > 1e-6 {
        return Err(FockError::BadTrace(tr.re));
    }
    let layout = rho.layout;
    let (n_a, n_b) = (layout.n_a(), layout.n_b());
    let qubit_dims = if layout.has_qubit() { 2 } else { 1 };

    let mut values = vec![C64::new(0.0, 0.0); basis.len()];
    for (pos, idx) in basis.indices().iter().enumerate() {
        let (j, k, l, m) = (idx.j, idx.k, idx.l, idx.m);
        let mut acc = C64::new(0.0, 0.0);
        // Tr(ρQ) = Σ_s ρ[s, t(s)] Q[t(s), s] with t_a = s_a − k + j,
        // t_b = s_b − m + l; Q's element is the product of square roots of
        // falling factorials from aᵏ then a†ʲ (and likewise for b).
        for sa in k..n_a {
            let ta = sa - k + j;
            if ta >= n_a {
                continue;
            }
            let wa = (falling(sa, k) * falling(ta, j)).sqrt();
            for sb in m..n_b {
                let tb = sb - m + l;
                if tb >= n_b {
                    continue;
                }
                let w = wa * (falling(sb, m) * falling(tb, l)).sqrt();
                for q in 0..qubit_dims {
                    let row = layout.flat(q, sa, sb);
                    let col = layout.flat(q, ta, tb);
                    acc += rho.data[(row, col)] * w;
                }
            }
        }
        values[pos] = acc;
    }

    // contamination: population of the top two levels of each mode (never
    // counting the vacuum level, so minimal cutoffs stay meaningful)
    let mut top_a = 0.0f64;
    let mut top_b = 0.0f64;
    let window_a = n_a.saturating_sub(2).max(1);
    let window_b = n_b.saturating_sub(2).max(1);
    for q in 0..qubit_dims {
        for na in 0..n_a {
            for nb in 0..n_b {
                let i = layout.flat(q, na, nb);
                let p = rho.data[(i, i)].re;
                if na >= window_a {
                    top_a += p;
                }
                if nb >= window_b {
                    top_b += p;
                }
            }
        }
    }

    Ok(FockMoments {
        moments: MomentVector::from_values(basis, values),
        contaminated: top_a.max(top_b) > CONTAMINATION_THRESHOLD,
        top_occupation_a: top_a,
        top_occupation_b: top_b,
    })
}
