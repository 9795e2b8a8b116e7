//! Steady-state solve and spectral stability of the moment hierarchy.
//!
//! The generator is block-triangular, so the steady state is obtained
//! order-by-order: x₀ = (1), and for n ≥ 1, L_n x_n = −S_n x_{n−2}. Each
//! block is checked for spectral stability first; a non-negative eigenvalue
//! real part signals parametric-gain blow-up and there is no steady state.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, Solve};
use num_complex::Complex64 as C64;

use crate::error::MomentError;
use crate::moments::basis::{MomentBasis, MomentIndex};
use crate::moments::generator::GeneratorBlocks;

/// Stability threshold: a block is flagged when max Re λ ≥ −ε_stab. Well
/// above double-precision eigensolver noise, far below physical rates.
pub const EPS_STAB: f64 = 1e-10;

/// Complex values aligned with a [`MomentBasis`]; the entry at (0,0,0,0) is
/// the trace moment and equals 1 for physical states.
#[derive(Debug, Clone)]
pub struct MomentVector {
    basis: MomentBasis,
    values: Vec<C64>,
}

impl MomentVector {
    /// The vacuum-moment vector: ⟨1⟩ = 1, all other moments zero.
    pub fn unit(basis: &MomentBasis) -> Self {
        let mut values = vec![C64::new(0.0, 0.0); basis.len()];
        values[0] = C64::new(1.0, 0.0);
        Self {
            basis: basis.clone(),
            values,
        }
    }

    /// Moments of a product of thermal states with mean occupations `na` and
    /// `nb`: ⟨a†ʲaᵏb†ˡbᵐ⟩ = δ_jk δ_lm · j! naʲ · l! nbˡ.
    pub fn thermal_product(basis: &MomentBasis, na: f64, nb: f64) -> Self {
        let mut out = Self::unit(basis);
        let factorial = |n: usize| (1..=n).map(|i| i as f64).product::<f64>();
        for (i, idx) in basis.indices().iter().enumerate() {
            if idx.j == idx.k && idx.l == idx.m {
                let v = factorial(idx.j) * na.powi(idx.j as i32) * factorial(idx.l)
                    * nb.powi(idx.l as i32);
                out.values[i] = C64::new(v, 0.0);
            }
        }
        out
    }

    pub fn from_values(basis: &MomentBasis, values: Vec<C64>) -> Self {
        assert_eq!(values.len(), basis.len());
        Self {
            basis: basis.clone(),
            values,
        }
    }

    pub fn basis(&self) -> &MomentBasis {
        &self.basis
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn value(&self, idx: MomentIndex) -> Option<C64> {
        self.basis.index_of(idx).map(|i| self.values[i])
    }

    /// Shorthand for `value(MomentIndex::new(j, k, l, m))`.
    pub fn get(&self, j: usize, k: usize, l: usize, m: usize) -> Option<C64> {
        self.value(MomentIndex::new(j, k, l, m))
    }

    /// Largest violation of the conjugation symmetry
    /// value(k,j,m,l) = conj(value(j,k,l,m)), relative to the vector scale.
    /// Maintained by the dynamics, not enforced by construction.
    pub fn conjugation_defect(&self) -> f64 {
        let scale = self
            .values
            .iter()
            .map(|v| v.norm())
            .fold(0.0f64, f64::max)
            .max(1e-300);
        self.basis
            .indices()
            .iter()
            .enumerate()
            .map(|(i, idx)| {
                let c = self.basis.index_of(idx.conj()).unwrap();
                (self.values[c] - self.values[i].conj()).norm()
            })
            .fold(0.0f64, f64::max)
            / scale
    }
}

/// Spectral abscissa (max Re λ) of one same-order block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderAbscissa {
    pub order: usize,
    pub abscissa: f64,
    /// True when the abscissa is ≥ −ε_stab, i.e. the block admits no
    /// decaying steady state.
    pub flagged: bool,
}

/// Per-order spectral abscissas of the generator (orders ≥ 1; the order-0
/// row is identically zero by trace preservation).
#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub orders: Vec<OrderAbscissa>,
}

impl StabilityReport {
    pub fn all_stable(&self) -> bool {
        self.orders.iter().all(|o| !o.flagged)
    }

    /// Worst (largest) abscissa across all orders.
    pub fn worst(&self) -> f64 {
        self.orders
            .iter()
            .map(|o| o.abscissa)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Smallest decay rate min |Re λ| over all orders, useful as a
    /// convergence timescale.
    pub fn slowest_rate(&self) -> f64 {
        self.orders
            .iter()
            .map(|o| -o.abscissa)
            .fold(f64::INFINITY, f64::min)
    }
}

fn block_eigenvalues(block: &Array2<C64>) -> Result<Array1<C64>, MomentError> {
    let (eigs, _) = block
        .eig()
        .map_err(|e| MomentError::Linalg(e.to_string()))?;
    Ok(eigs)
}

fn block_abscissa(block: &Array2<C64>) -> Result<(f64, C64), MomentError> {
    let eigs = block_eigenvalues(block)?;
    let mut worst = C64::new(f64::NEG_INFINITY, 0.0);
    for &e in eigs.iter() {
        if e.re > worst.re {
            worst = e;
        }
    }
    Ok((worst.re, worst))
}

/// Max Re λ(L_n) for each order n ≥ 1, flagging any ≥ −ε_stab.
pub fn stability_report(gen: &GeneratorBlocks) -> Result<StabilityReport, MomentError> {
    let mut orders = Vec::new();
    for n in 1..=gen.max_order() {
        let (abscissa, _) = block_abscissa(gen.l_block(n))?;
        orders.push(OrderAbscissa {
            order: n,
            abscissa,
            flagged: abscissa >= -EPS_STAB,
        });
    }
    Ok(StabilityReport { orders })
}

/// Solve the steady state order-by-order. Errors with `Unstable` if any
/// block has an eigenvalue with Re λ ≥ −ε_stab, or `Singular` if a block is
/// numerically rank-deficient.
pub fn steady_state(gen: &GeneratorBlocks) -> Result<MomentVector, MomentError> {
    let basis = gen.basis();
    let mut x = vec![C64::new(0.0, 0.0); basis.len()];
    x[0] = C64::new(1.0, 0.0);

    for n in 1..=gen.max_order() {
        let ln = gen.l_block(n);
        let (abscissa, eigenvalue) = block_abscissa(ln)?;
        if abscissa >= -EPS_STAB {
            return Err(MomentError::Unstable {
                order: n,
                eigenvalue,
            });
        }

        let rows = basis.order_range(n);
        if n < 2 {
            // S₁ ≡ 0: stable homogeneous block, steady moments exactly zero.
            continue;
        }
        let low = basis.order_range(n - 2);
        let sn = gen.s_block(n);
        let mut rhs = Array1::<C64>::zeros(rows.len());
        let mut any_nonzero = false;
        for ri in 0..rows.len() {
            let mut acc = C64::new(0.0, 0.0);
            for (ci, cflat) in low.clone().enumerate() {
                acc += sn[(ri, ci)] * x[cflat];
            }
            if acc != C64::new(0.0, 0.0) {
                any_nonzero = true;
            }
            rhs[ri] = -acc;
        }
        if !any_nonzero {
            continue; // odd orders: inhomogeneity vanishes identically
        }
        let sol = ln
            .solve(&rhs)
            .map_err(|_| MomentError::Singular { order: n })?;
        for (ri, r) in rows.enumerate() {
            x[r] = sol[ri];
        }
    }

    Ok(MomentVector::from_values(basis, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::EffectiveCoefficients;
    use crate::moments::generator::assemble_generator;
    use crate::params::ModelParams;
    use approx::assert_abs_diff_eq;

    fn thermal_params(nbar: f64) -> ModelParams {
        ModelParams {
            g: 0.0,
            lambda: 0.0,
            nbar,
            ..ModelParams::demo()
        }
    }

    fn generator_for(p: &ModelParams, max_order: usize) -> GeneratorBlocks {
        let d = p.dressed().unwrap();
        let c = EffectiveCoefficients::evaluate(p, &d).unwrap();
        let basis = MomentBasis::new(max_order).unwrap();
        assemble_generator(&c, p.delta1, p.omega_m, &basis)
    }

    #[test]
    fn decoupled_thermal_steady_state() {
        for nbar in [0.5, 2.0] {
            let gen = generator_for(&thermal_params(nbar), 4);
            let x = steady_state(&gen).unwrap();
            let nb = x.get(0, 0, 1, 1).unwrap();
            let na = x.get(1, 1, 0, 0).unwrap();
            let b2 = x.get(0, 0, 2, 2).unwrap();
            assert_abs_diff_eq!(nb.re, nbar, epsilon = 1e-10);
            assert_abs_diff_eq!(nb.im, 0.0, epsilon = 1e-12);
            assert!(na.norm() < 1e-12);
            assert_abs_diff_eq!(b2.re, 2.0 * nbar * nbar, epsilon = 1e-9);
            // all odd moments vanish identically
            for n in [1usize, 3] {
                for flat in gen.basis().order_range(n) {
                    assert_eq!(x.values()[flat], C64::new(0.0, 0.0));
                }
            }
            assert!(x.conjugation_defect() < 1e-12);
        }
    }

    #[test]
    fn first_moments_vanish_whenever_stable() {
        let gen = generator_for(&ModelParams::demo(), 4);
        let x = steady_state(&gen).unwrap();
        for flat in gen.basis().order_range(1) {
            assert_eq!(x.values()[flat], C64::new(0.0, 0.0));
        }
        assert!(x.conjugation_defect() < 1e-10);
    }

    #[test]
    fn lossless_decoupled_generator_is_flagged_unstable() {
        let p = ModelParams {
            g: 0.0,
            lambda: 0.0,
            kappa_a: 0.0,
            kappa_b: 0.0,
            ..ModelParams::demo()
        };
        let gen = generator_for(&p, 2);
        let report = stability_report(&gen).unwrap();
        assert!(report.orders.iter().any(|o| o.flagged));
        assert!(matches!(
            steady_state(&gen),
            Err(MomentError::Unstable { .. })
        ));
    }

    #[test]
    fn decoupled_abscissa_is_the_weaker_damping_rate() {
        let p = thermal_params(1.0);
        let gen = generator_for(&p, 2);
        let report = stability_report(&gen).unwrap();
        let first = &report.orders[0];
        assert_eq!(first.order, 1);
        assert_abs_diff_eq!(
            first.abscissa,
            (-p.kappa_a).max(-p.kappa_b),
            epsilon = 1e-12
        );
        assert!(!first.flagged);
    }

    #[test]
    fn demo_point_is_stable_at_all_orders() {
        let gen = generator_for(&ModelParams::demo(), 4);
        let report = stability_report(&gen).unwrap();
        assert!(report.all_stable());
        assert!(report.worst() < 0.0);
        // order-n abscissa is n times the order-1 abscissa for this quadratic
        // generator (eigenvalues of L_n are n-fold sums of the order-1 ones)
        let a1 = report.orders[0].abscissa;
        for o in &report.orders {
            assert_abs_diff_eq!(o.abscissa, a1 * o.order as f64, epsilon = 1e-8);
        }
    }

    #[test]
    fn singular_block_is_reported() {
        // a1 = b1 with no couplings makes the photon part of L₁ exactly zero
        let p = thermal_params(1.0);
        let d = p.dressed().unwrap();
        let mut c = EffectiveCoefficients::evaluate(&p, &d).unwrap();
        c.b1 = c.a1; // removes κ_a damping
        c.b2 = c.a2 + C64::new(p.kappa_b, 0.0);
        let basis = MomentBasis::new(2).unwrap();
        let gen = assemble_generator(&c, p.delta1, p.omega_m, &basis);
        // the zero eigenvalue is caught by the stability check first
        assert!(matches!(
            steady_state(&gen),
            Err(MomentError::Unstable { .. }) | Err(MomentError::Singular { .. })
        ));
    }

    #[test]
    fn moment_vector_accessors() {
        let basis = MomentBasis::new(2).unwrap();
        let v = MomentVector::thermal_product(&basis, 0.0, 2.0);
        assert_eq!(v.get(0, 0, 0, 0).unwrap(), C64::new(1.0, 0.0));
        assert_eq!(v.get(0, 0, 1, 1).unwrap(), C64::new(2.0, 0.0));
        assert_eq!(v.get(1, 1, 0, 0).unwrap(), C64::new(0.0, 0.0));
        assert_eq!(v.get(0, 1, 0, 1).unwrap(), C64::new(0.0, 0.0));
        assert!(v.get(3, 0, 0, 0).is_none());
        assert_eq!(v.conjugation_defect(), 0.0);
    }
}
