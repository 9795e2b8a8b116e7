//! Physical observables from moment vectors: mean occupations, zero-delay
//! second-order correlations, and the Cauchy-Schwarz figure of merit
//! CSI = g₁⁽²⁾ g₂⁽²⁾ / (g₃⁽²⁾)². Values below one certify nonclassical
//! photon-phonon correlations.

use crate::error::ObservableError;
use crate::moments::{MomentIndex, MomentVector};

/// Tolerated relative imaginary part of a physical moment.
pub const EPS_IM: f64 = 1e-8;
/// Mean occupation below which a mode is declared vacuum and its
/// correlations Undefined (0/0 is a legitimate regime, not an error).
pub const EPS_DEN: f64 = 1e-12;

/// Mean occupations and zero-delay correlations. `None` marks an Undefined
/// ratio (vacuum denominator), which is an outcome, not an error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationSet {
    /// ⟨a†a⟩
    pub mean_a: f64,
    /// ⟨b†b⟩
    pub mean_b: f64,
    /// g₁⁽²⁾(0) = ⟨a†²a²⟩ / ⟨a†a⟩²
    pub g2_photon: Option<f64>,
    /// g₂⁽²⁾(0) = ⟨b†²b²⟩ / ⟨b†b⟩²
    pub g2_phonon: Option<f64>,
    /// g₃⁽²⁾(0) = ⟨a†a b†b⟩ / (⟨a†a⟩⟨b†b⟩)
    pub g2_cross: Option<f64>,
    /// g₁⁽²⁾ g₂⁽²⁾ / (g₃⁽²⁾)², when all three factors are defined.
    pub csi: Option<f64>,
}

impl CorrelationSet {
    /// True when the Cauchy-Schwarz inequality is violated (CSI < 1).
    pub fn csi_violated(&self) -> bool {
        matches!(self.csi, Some(v) if v < 1.0)
    }
}

/// Extract a required physical moment: asserts the imaginary part is below
/// tolerance and the real part is not significantly negative, then discards
/// the imaginary part.
fn real_moment(
    x: &MomentVector,
    idx: MomentIndex,
    name: &'static str,
    scale: f64,
) -> Result<f64, ObservableError> {
    let v = x.value(idx).ok_or(ObservableError::MissingMoments)?;
    let tol = EPS_IM * scale.max(v.norm());
    if v.im.abs() > tol {
        return Err(ObservableError::NonPhysical { name, value: v.im });
    }
    if v.re < -tol {
        return Err(ObservableError::NonPhysical { name, value: v.re });
    }
    Ok(v.re)
}

/// Map a moment vector (orders ≤ 4 required) to occupations, correlation
/// functions and the CSI.
pub fn correlations(x: &MomentVector) -> Result<CorrelationSet, ObservableError> {
    let scale = x
        .values()
        .iter()
        .map(|v| v.norm())
        .fold(0.0f64, f64::max)
        .max(1.0);

    let mean_a = real_moment(x, MomentIndex::new(1, 1, 0, 0), "<adag a>", scale)?;
    let mean_b = real_moment(x, MomentIndex::new(0, 0, 1, 1), "<bdag b>", scale)?;
    let aa = real_moment(x, MomentIndex::new(2, 2, 0, 0), "<adag2 a2>", scale)?;
    let bb = real_moment(x, MomentIndex::new(0, 0, 2, 2), "<bdag2 b2>", scale)?;
    let ab = real_moment(x, MomentIndex::new(1, 1, 1, 1), "<adag a bdag b>", scale)?;

    let g2_photon = (mean_a >= EPS_DEN).then(|| aa / (mean_a * mean_a));
    let g2_phonon = (mean_b >= EPS_DEN).then(|| bb / (mean_b * mean_b));
    let g2_cross = (mean_a >= EPS_DEN && mean_b >= EPS_DEN).then(|| ab / (mean_a * mean_b));

    let csi = match (g2_photon, g2_phonon, g2_cross) {
        (Some(g1), Some(g2), Some(g3)) if g3.abs() >= EPS_DEN => Some(g1 * g2 / (g3 * g3)),
        _ => None,
    };

    Ok(CorrelationSet {
        mean_a,
        mean_b,
        g2_photon,
        g2_phonon,
        g2_cross,
        csi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{MomentBasis, MomentVector};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use num_complex::Complex64 as C64;
    use proptest::prelude::*;

    fn vector_from(entries: &[(MomentIndex, C64)]) -> MomentVector {
        let basis = MomentBasis::new(4).unwrap();
        let mut values = vec![C64::new(0.0, 0.0); basis.len()];
        values[0] = C64::new(1.0, 0.0);
        let mut v = MomentVector::from_values(&basis, values);
        let mut raw = v.values().to_vec();
        for &(idx, val) in entries {
            raw[basis.index_of(idx).unwrap()] = val;
        }
        v = MomentVector::from_values(&basis, raw);
        v
    }

    fn set_from(na: f64, nb: f64, aa: f64, bb: f64, ab: f64) -> CorrelationSet {
        let v = vector_from(&[
            (MomentIndex::new(1, 1, 0, 0), C64::new(na, 0.0)),
            (MomentIndex::new(0, 0, 1, 1), C64::new(nb, 0.0)),
            (MomentIndex::new(2, 2, 0, 0), C64::new(aa, 0.0)),
            (MomentIndex::new(0, 0, 2, 2), C64::new(bb, 0.0)),
            (MomentIndex::new(1, 1, 1, 1), C64::new(ab, 0.0)),
        ]);
        correlations(&v).unwrap()
    }

    #[test]
    fn uncorrelated_thermal_pair_has_csi_four() {
        // g1 = 2, g2 = 2, g3 = 1  ->  CSI = 4
        let s = set_from(1.0, 2.0, 2.0, 8.0, 2.0);
        assert_abs_diff_eq!(s.g2_photon.unwrap(), 2.0);
        assert_abs_diff_eq!(s.g2_phonon.unwrap(), 2.0);
        assert_abs_diff_eq!(s.g2_cross.unwrap(), 1.0);
        assert_abs_diff_eq!(s.csi.unwrap(), 4.0);
        assert!(!s.csi_violated());
    }

    #[test]
    fn coherent_pair_has_csi_one() {
        // independent coherent states: all three g's equal 1
        let s = set_from(0.5, 3.0, 0.25, 9.0, 1.5);
        assert_abs_diff_eq!(s.csi.unwrap(), 1.0);
        assert!(!s.csi_violated());
    }

    #[test]
    fn photon_vacuum_is_undefined_not_an_error() {
        // g = λ = 0 regime: thermal phonons, photon vacuum.
        let nbar = 1.5;
        let s = set_from(0.0, nbar, 0.0, 2.0 * nbar * nbar, 0.0);
        assert_eq!(s.g2_photon, None);
        assert_eq!(s.g2_cross, None);
        assert_eq!(s.csi, None);
        assert_relative_eq!(s.g2_phonon.unwrap(), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn nonphysical_moments_are_rejected() {
        let v = vector_from(&[
            (MomentIndex::new(1, 1, 0, 0), C64::new(-0.5, 0.0)),
            (MomentIndex::new(0, 0, 1, 1), C64::new(1.0, 0.0)),
        ]);
        assert!(matches!(
            correlations(&v),
            Err(ObservableError::NonPhysical { .. })
        ));

        let v = vector_from(&[
            (MomentIndex::new(1, 1, 0, 0), C64::new(1.0, 0.3)),
            (MomentIndex::new(0, 0, 1, 1), C64::new(1.0, 0.0)),
        ]);
        assert!(matches!(
            correlations(&v),
            Err(ObservableError::NonPhysical { .. })
        ));
    }

    #[test]
    fn order_two_vector_is_missing_moments() {
        let basis = MomentBasis::new(2).unwrap();
        let v = MomentVector::thermal_product(&basis, 0.5, 0.5);
        assert!(matches!(
            correlations(&v),
            Err(ObservableError::MissingMoments)
        ));
    }

    #[test]
    fn tiny_imaginary_parts_are_discarded() {
        let v = vector_from(&[
            (MomentIndex::new(1, 1, 0, 0), C64::new(1.0, 1e-12)),
            (MomentIndex::new(0, 0, 1, 1), C64::new(2.0, -1e-12)),
            (MomentIndex::new(2, 2, 0, 0), C64::new(2.0, 1e-13)),
            (MomentIndex::new(0, 0, 2, 2), C64::new(8.0, 0.0)),
            (MomentIndex::new(1, 1, 1, 1), C64::new(2.0, 0.0)),
        ]);
        let s = correlations(&v).unwrap();
        assert_abs_diff_eq!(s.mean_a, 1.0);
        assert_abs_diff_eq!(s.csi.unwrap(), 4.0);
    }

    proptest! {
        /// CSI is degree-0 homogeneous per mode: rescaling the photon sector
        /// as <a†a> -> c<a†a>, <a†²a²> -> c²<a†²a²>, <a†a b†b> -> c<a†a b†b>
        /// leaves it unchanged (same for the phonon sector).
        #[test]
        fn csi_is_scale_invariant(
            na in 0.01..10.0f64,
            nb in 0.01..10.0f64,
            g1 in 0.1..4.0f64,
            g2 in 0.1..4.0f64,
            g3 in 0.1..4.0f64,
            c in 0.01..100.0f64,
        ) {
            let base = set_from(na, nb, g1 * na * na, g2 * nb * nb, g3 * na * nb);
            let scaled = set_from(c * na, nb, g1 * (c * na) * (c * na), g2 * nb * nb, g3 * (c * na) * nb);
            let x = base.csi.unwrap();
            let y = scaled.csi.unwrap();
            prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
        }

        /// Classical two-mode constructions (independent thermal/coherent
        /// mixtures with g₃ = 1) never violate the CSI.
        #[test]
        fn classical_product_states_respect_csi(
            na in 0.01..20.0f64,
            nb in 0.01..20.0f64,
            // mixture weight between coherent (g²=1) and thermal (g²=2) stats
            wa in 0.0..1.0f64,
            wb in 0.0..1.0f64,
        ) {
            let g1 = 1.0 + wa; // ∈ [1, 2]
            let g2 = 1.0 + wb;
            let s = set_from(na, nb, g1 * na * na, g2 * nb * nb, na * nb);
            prop_assert!(s.csi.unwrap() >= 1.0 - 1e-12);
        }
    }
}
