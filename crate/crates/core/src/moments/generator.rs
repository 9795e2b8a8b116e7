//! Assembly of the block-triangular linear generator of the moment hierarchy.
//!
//! Every normally-ordered moment ⟨a†ʲ aᵏ b†ˡ bᵐ⟩ obeys a linear equation of
//! motion with exactly ten terms: a diagonal term, four same-order couplings
//! at shifted indices, and four couplings two orders down. The generator is
//! therefore block-triangular: d(order n)/dt depends on orders n and n−2
//! only. Terms whose integer prefactor vanishes are omitted, which is also
//! exactly when the shifted target would have a negative component.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::coeffs::EffectiveCoefficients;
use crate::moments::basis::{MomentBasis, MomentIndex};

/// Precomputed coefficient combinations. Conjugate partners are stored
/// explicitly so that conjugate rows are assembled from bitwise-conjugate
/// constants, making conjugation covariance of the generator exact.
#[derive(Debug, Clone, Copy)]
struct TermWeights {
    alpha1: C64,  // a1 - b1
    alpha1c: C64, // conj(a1 - b1)
    alpha2: C64,  // a2 - b2
    alpha2c: C64,
    c1d1: C64, // c1 - d1
    c1d1c: C64,
    c2d2: C64, // c2 - d2
    c2d2c: C64,
    cross_dn: C64, // c1 + c2
    cross_dnc: C64,
    photon_dn: C64, // a1 + conj(a1)
    phonon_dn: C64, // a2 + conj(a2)
}

impl TermWeights {
    fn new(c: &EffectiveCoefficients) -> Self {
        let alpha1 = c.a1 - c.b1;
        let alpha2 = c.a2 - c.b2;
        let c1d1 = c.c1 - c.d1;
        let c2d2 = c.c2 - c.d2;
        let cross_dn = c.c1 + c.c2;
        Self {
            alpha1,
            alpha1c: alpha1.conj(),
            alpha2,
            alpha2c: alpha2.conj(),
            c1d1,
            c1d1c: c1d1.conj(),
            c2d2,
            c2d2c: c2d2.conj(),
            cross_dn,
            cross_dnc: cross_dn.conj(),
            photon_dn: c.a1 + c.a1.conj(),
            phonon_dn: c.a2 + c.a2.conj(),
        }
    }
}

/// The block-triangular generator: one dense same-order block L_n per order,
/// plus a rectangular block S_n feeding order n from order n−2.
#[derive(Debug, Clone)]
pub struct GeneratorBlocks {
    basis: MomentBasis,
    /// `l_blocks[n]`: square same-order coupling of the order-n group.
    l_blocks: Vec<Array2<C64>>,
    /// `s_blocks[n]`: rows = order-n group, columns = order-(n−2) group.
    /// Empty (0-column) for n < 2.
    s_blocks: Vec<Array2<C64>>,
}

impl GeneratorBlocks {
    pub fn basis(&self) -> &MomentBasis {
        &self.basis
    }

    pub fn max_order(&self) -> usize {
        self.basis.max_order()
    }

    pub fn l_block(&self, n: usize) -> &Array2<C64> {
        &self.l_blocks[n]
    }

    pub fn s_block(&self, n: usize) -> &Array2<C64> {
        &self.s_blocks[n]
    }

    /// Apply the full generator to a flat moment vector: for each order n,
    /// out_n = L_n x_n + S_n x_{n−2}.
    pub fn apply(&self, x: &[C64], out: &mut [C64]) {
        assert_eq!(x.len(), self.basis.len());
        assert_eq!(out.len(), self.basis.len());
        for n in 0..=self.max_order() {
            let rows = self.basis.order_range(n);
            let ln = &self.l_blocks[n];
            let xn = &x[rows.clone()];
            for (ri, r) in rows.clone().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (ci, &xv) in xn.iter().enumerate() {
                    acc += ln[(ri, ci)] * xv;
                }
                out[r] = acc;
            }
            if n >= 2 {
                let low = self.basis.order_range(n - 2);
                let sn = &self.s_blocks[n];
                let xl = &x[low];
                for (ri, r) in rows.enumerate() {
                    let mut acc = C64::new(0.0, 0.0);
                    for (ci, &xv) in xl.iter().enumerate() {
                        acc += sn[(ri, ci)] * xv;
                    }
                    out[r] += acc;
                }
            }
        }
    }
}

/// Assemble the generator for the given coefficients and detuning data over
/// `basis`. Total function of valid inputs.
pub fn assemble_generator(
    c: &EffectiveCoefficients,
    delta1: f64,
    omega_m: f64,
    basis: &MomentBasis,
) -> GeneratorBlocks {
    let w = TermWeights::new(c);
    let max_order = basis.max_order();

    let mut l_blocks: Vec<Array2<C64>> = (0..=max_order)
        .map(|n| Array2::zeros((basis.group_len(n), basis.group_len(n))))
        .collect();
    let mut s_blocks: Vec<Array2<C64>> = (0..=max_order)
        .map(|n| {
            let cols = if n >= 2 { basis.group_len(n - 2) } else { 0 };
            Array2::zeros((basis.group_len(n), cols))
        })
        .collect();

    for (flat, &idx) in basis.indices().iter().enumerate() {
        let MomentIndex { j, k, l, m } = idx;
        let n = idx.order();
        let row = flat - basis.order_range(n).start;
        let local =
            |target: MomentIndex| basis.index_of(target).unwrap() - basis.order_range(target.order()).start;

        // diagonal: (A₁*−B₁*)j + (A₁−B₁)k + (A₂*−B₂*)l + (A₂−B₂)m
        //           − (i/2)(Δ₁−ω)(j−k+l−m),
        // accumulated as mode pairs so conjugate rows are exact conjugates.
        let mut photon_pair = C64::new(0.0, 0.0);
        if j > 0 {
            photon_pair += w.alpha1c * j as f64;
        }
        if k > 0 {
            photon_pair += w.alpha1 * k as f64;
        }
        let mut phonon_pair = C64::new(0.0, 0.0);
        if l > 0 {
            phonon_pair += w.alpha2c * l as f64;
        }
        if m > 0 {
            phonon_pair += w.alpha2 * m as f64;
        }
        let mut diag = photon_pair + phonon_pair;
        let charge = idx.rotation_charge();
        if charge != 0 {
            diag += C64::new(0.0, -0.5 * (delta1 - omega_m) * charge as f64);
        }
        l_blocks[n][(row, row)] += diag;

        // same-order couplings at shifted indices
        if m > 0 {
            let t = MomentIndex::new(j + 1, k, l, m - 1);
            l_blocks[n][(row, local(t))] += w.c1d1 * m as f64;
        }
        if j > 0 {
            let t = MomentIndex::new(j - 1, k, l, m + 1);
            l_blocks[n][(row, local(t))] += w.c2d2c * j as f64;
        }
        if l > 0 {
            let t = MomentIndex::new(j, k + 1, l - 1, m);
            l_blocks[n][(row, local(t))] += w.c1d1c * l as f64;
        }
        if k > 0 {
            let t = MomentIndex::new(j, k - 1, l + 1, m);
            l_blocks[n][(row, local(t))] += w.c2d2 * k as f64;
        }

        // couplings two orders down
        if j > 0 && l > 0 {
            let t = MomentIndex::new(j - 1, k, l - 1, m);
            s_blocks[n][(row, local(t))] += w.cross_dnc * (j * l) as f64;
        }
        if j > 0 && k > 0 {
            let t = MomentIndex::new(j - 1, k - 1, l, m);
            s_blocks[n][(row, local(t))] += w.photon_dn * (j * k) as f64;
        }
        if k > 0 && m > 0 {
            let t = MomentIndex::new(j, k - 1, l, m - 1);
            s_blocks[n][(row, local(t))] += w.cross_dn * (k * m) as f64;
        }
        if l > 0 && m > 0 {
            let t = MomentIndex::new(j, k, l - 1, m - 1);
            s_blocks[n][(row, local(t))] += w.phonon_dn * (l * m) as f64;
        }
    }

    GeneratorBlocks {
        basis: basis.clone(),
        l_blocks,
        s_blocks,
    }
}
