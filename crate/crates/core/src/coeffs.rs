//! The eight complex coefficients driving the reduced photon-phonon dynamics.
//!
//! a1/b1 govern the cavity mode, a2/b2 the phonon mode, and c1/c2/d1/d2 the
//! cross-mode two-mode-squeezing-type couplings. The b and d coefficients
//! follow from the a and c ones by swapping the dressed populations P∓ ↔ P±,
//! with the bare damping rates κ_a and κ_b added to b1 and b2.

use num_complex::Complex64 as C64;

use crate::error::CoeffError;
use crate::params::{DressedParams, ModelParams};

/// The eight complex rates of the reduced two-mode dynamics, in units of γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveCoefficients {
    pub a1: C64,
    pub b1: C64,
    pub c1: C64,
    pub d1: C64,
    pub a2: C64,
    pub b2: C64,
    pub c2: C64,
    pub d2: C64,
}

/// Trigonometric and rate inputs shared by all eight closed forms.
#[derive(Debug, Clone, Copy)]
pub(crate) struct CoeffInputs {
    pub g: f64,
    pub lambda: f64,
    pub delta1: f64,
    pub omega_m: f64,
    pub gamma_perp: f64,
    pub gamma_par: f64,
    pub two_omega_r: f64,
    pub sin_2t: f64,
    pub cos_2t: f64,
    pub sin2: f64,
    pub cos2: f64,
}

impl CoeffInputs {
    fn new(p: &ModelParams, d: &DressedParams) -> Self {
        // Algebraic forms of the dressing trigonometry (see
        // `ModelParams::dressed`): exact symmetry at Δ = 0.
        let cos_2t = 0.5 * p.delta / d.omega_r;
        Self {
            g: p.g,
            lambda: p.lambda,
            delta1: p.delta1,
            omega_m: p.omega_m,
            gamma_perp: d.gamma_perp,
            gamma_par: d.gamma_par,
            two_omega_r: 2.0 * d.omega_r,
            sin_2t: p.omega_rabi / d.omega_r,
            cos_2t,
            sin2: 0.5 * (1.0 - cos_2t),
            cos2: 0.5 * (1.0 + cos_2t),
        }
    }
}

fn im(x: f64) -> C64 {
    C64::new(0.0, x)
}

/// Photon self-coefficient before any additive damping. b1 is this with the
/// populations swapped plus κ_a.
pub(crate) fn photon_coeff(i: &CoeffInputs, p_plus: f64, p_minus: f64) -> C64 {
    let g2 = i.g * i.g;
    g2 * i.sin_2t * i.sin_2t / 4.0 / (i.gamma_par + im(i.delta1))
        + g2 * p_minus * i.sin2 * i.sin2 / (i.gamma_perp - im(i.two_omega_r - i.delta1))
        + g2 * p_plus * i.cos2 * i.cos2 / (i.gamma_perp + im(i.two_omega_r + i.delta1))
}

/// Phonon self-coefficient without the thermal κ_b n̄ term. b2 is this with
/// the populations swapped plus κ_b n̄ + κ_b.
pub(crate) fn phonon_coeff(i: &CoeffInputs, p_plus: f64, p_minus: f64) -> C64 {
    let l2 = i.lambda * i.lambda;
    let s2 = i.sin_2t * i.sin_2t;
    (l2 * i.cos_2t * i.cos_2t / (i.gamma_par - im(i.omega_m))
        + l2 * p_minus * s2 / (i.gamma_perp - im(i.two_omega_r + i.omega_m))
        + l2 * p_plus * s2 / (i.gamma_perp + im(i.two_omega_r - i.omega_m)))
        / 4.0
}

/// Cross coefficient c1 (photon-side squeezing channel); d1 is the
/// population-swapped version.
pub(crate) fn cross_coeff_1(i: &CoeffInputs, p_plus: f64, p_minus: f64) -> C64 {
    let gl = i.g * i.lambda * i.sin_2t;
    p_plus / 2.0 * gl * i.cos2 / (i.gamma_perp - im(i.two_omega_r + i.delta1))
        - p_minus / 2.0 * gl * i.sin2 / (i.gamma_perp + im(i.two_omega_r - i.delta1))
        - gl * i.cos_2t / 4.0 / (i.gamma_par - im(i.delta1))
}

/// Cross coefficient c2 (phonon-side squeezing channel); d2 is the
/// population-swapped version.
pub(crate) fn cross_coeff_2(i: &CoeffInputs, p_plus: f64, p_minus: f64) -> C64 {
    let gl = i.g * i.lambda * i.sin_2t;
    p_minus / 2.0 * gl * i.cos2 / (i.gamma_perp + im(i.two_omega_r + i.omega_m))
        - p_plus / 2.0 * gl * i.sin2 / (i.gamma_perp - im(i.two_omega_r - i.omega_m))
        - gl * i.cos_2t / 4.0 / (i.gamma_par + im(i.omega_m))
}

impl EffectiveCoefficients {
    /// Evaluate all eight coefficients. `d` must come from
    /// [`ModelParams::dressed`] on the same `p`.
    pub fn evaluate(p: &ModelParams, d: &DressedParams) -> Result<Self, CoeffError> {
        let i = CoeffInputs::new(p, d);
        let (pp, pm) = (d.p_plus, d.p_minus);

        let a1 = photon_coeff(&i, pp, pm);
        let b1 = photon_coeff(&i, pm, pp) + p.kappa_a;
        // Thermal terms keep their printed placement: κ_b n̄ inside a2, and
        // b2 additionally gains the bare κ_b, so g = λ = 0 reproduces exact
        // thermal damping with <b†b> -> n̄.
        let a2 = phonon_coeff(&i, pp, pm) + p.kappa_b * p.nbar;
        let b2 = phonon_coeff(&i, pm, pp) + p.kappa_b * p.nbar + p.kappa_b;
        let c1 = cross_coeff_1(&i, pp, pm);
        let d1 = cross_coeff_1(&i, pm, pp);
        let c2 = cross_coeff_2(&i, pp, pm);
        let d2 = cross_coeff_2(&i, pm, pp);

        let out = Self {
            a1,
            b1,
            c1,
            d1,
            a2,
            b2,
            c2,
            d2,
        };
        for (name, v) in out.named() {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(CoeffError::NonFinite { name });
            }
        }
        Ok(out)
    }

    pub fn named(&self) -> [(&'static str, C64); 8] {
        [
            ("a1", self.a1),
            ("b1", self.b1),
            ("c1", self.c1),
            ("d1", self.d1),
            ("a2", self.a2),
            ("b2", self.b2),
            ("c2", self.c2),
            ("d2", self.d2),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn demo_coeffs(delta1: f64, nbar: f64) -> EffectiveCoefficients {
        let p = ModelParams {
            delta1,
            nbar,
            ..ModelParams::demo()
        };
        let d = p.dressed().unwrap();
        EffectiveCoefficients::evaluate(&p, &d).unwrap()
    }

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    // Golden fixture: 50-digit reference evaluation of the closed forms at
    // the demo set with Δ₁ = ω = 50 and n̄ = 2.
    const GOLDEN: [(f64, f64); 8] = [
        (0.001_818_800_989_762_232_7, -0.027_083_254_767_778_280), // a1
        (0.092_549_320_751_364_038, 0.001_044_973_230_656_743_7),  // b1
        (-0.000_181_581_573_750_100_60, 0.057_044_673_961_311_262), // c1
        (-0.001_233_048_044_243_852_1, 0.082_562_369_746_215_206), // d1
        (0.020_639_692_546_404_068, -0.055_432_601_690_588_287),   // a2
        (0.028_532_256_592_198_575, 0.000_330_851_666_965_430_98), // b2
        (-0.001_233_048_044_243_852_1, -0.082_562_369_746_215_206), // c2
        (-0.000_181_581_573_750_100_60, -0.057_044_673_961_311_262), // d2
    ];

    #[test]
    fn golden_point_matches_reference_evaluation() {
        let c = demo_coeffs(50.0, 2.0);
        let got = c.named();
        for (k, (re, imv)) in GOLDEN.iter().enumerate() {
            let want = C64::new(*re, *imv);
            assert!(
                rel(got[k].1, want) < 1e-13,
                "{}: got {:?}, want {:?}",
                got[k].0,
                got[k].1,
                want
            );
        }
    }

    #[test]
    fn decoupled_cavity_when_g_vanishes() {
        let p = ModelParams {
            g: 0.0,
            ..ModelParams::demo()
        };
        let d = p.dressed().unwrap();
        let c = EffectiveCoefficients::evaluate(&p, &d).unwrap();
        assert_eq!(c.a1, C64::new(0.0, 0.0));
        assert_eq!(c.b1, C64::new(p.kappa_a, 0.0));
        assert_eq!(c.c1, C64::new(0.0, 0.0));
        assert_eq!(c.c2, C64::new(0.0, 0.0));
        assert_eq!(c.d1, C64::new(0.0, 0.0));
        assert_eq!(c.d2, C64::new(0.0, 0.0));
    }

    #[test]
    fn thermal_pair_when_both_couplings_vanish() {
        let p = ModelParams {
            g: 0.0,
            lambda: 0.0,
            nbar: 1.7,
            ..ModelParams::demo()
        };
        let d = p.dressed().unwrap();
        let c = EffectiveCoefficients::evaluate(&p, &d).unwrap();
        assert_eq!(c.a2, C64::new(p.kappa_b * 1.7, 0.0));
        assert_eq!(c.b2, C64::new(p.kappa_b * 1.7 + p.kappa_b, 0.0));
        assert_eq!(c.c1, C64::new(0.0, 0.0));
        assert_eq!(c.d2, C64::new(0.0, 0.0));
    }

    #[test]
    fn cross_terms_collapse_at_zero_detuning() {
        // Δ = 0 makes P₊ = P₋, so the population swap is the identity and
        // c and d coincide bitwise.
        let p = ModelParams {
            delta: 0.0,
            ..ModelParams::demo()
        };
        let d = p.dressed().unwrap();
        let c = EffectiveCoefficients::evaluate(&p, &d).unwrap();
        assert_eq!(c.c1, c.d1);
        assert_eq!(c.c2, c.d2);
    }

    #[test]
    fn net_damping_at_golden_point() {
        for nbar in [0.5, 2.0] {
            let c = demo_coeffs(50.0, nbar);
            assert!((c.b1 - c.a1).re > 0.0);
            assert!((c.b2 - c.a2).re > 0.0);
        }
    }

    #[test]
    fn continuity_in_delta1() {
        // Finite-difference derivative halves its error when the step halves
        // (first-order consistency of the centered estimate ratio).
        let f = |d1: f64| demo_coeffs(d1, 2.0).a1;
        let x = 50.0;
        let h = 0.5;
        let fd = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
        let d1 = fd(h);
        let d2 = fd(h / 2.0);
        let d4 = fd(h / 4.0);
        // centered differences are O(h²): error ratio ≈ 4.
        let e1 = (d1 - d4).norm();
        let e2 = (d2 - d4).norm();
        assert!(e2 < 0.5 * e1, "no first-order improvement: {e1} vs {e2}");
    }

    #[test]
    fn rejects_vanishing_linewidths() {
        // γ = γ_c = 0 makes Γ∥ = Γ⊥ = 0 and the closed forms divide by zero
        // at Δ₁ = 0 resonances; evaluation must flag non-finite output
        // rather than emit NaN.
        let p = ModelParams {
            gamma: 0.0,
            gamma_c: 0.0,
            delta: 0.0,
            delta1: 0.0,
            omega_m: 2.0 * 51.0,
            omega_rabi: 25.5,
            ..ModelParams::demo()
        };
        // 2Ω_R - ω = 0 here, so the c2 denominator Γ⊥ - i(2Ω_R - ω) = 0.
        let d = p.dressed().unwrap();
        assert!(EffectiveCoefficients::evaluate(&p, &d).is_err());
    }

    proptest! {
        #[test]
        fn population_swap_is_an_involution(
            delta in -150.0..150.0f64,
            omega in 1.0..150.0f64,
            g in 0.0..10.0f64,
            lambda in 0.0..10.0f64,
            delta1 in 1.0..120.0f64,
        ) {
            let p = ModelParams { delta, omega_rabi: omega, g, lambda, delta1, ..ModelParams::demo() };
            let d = p.dressed().unwrap();
            let i = CoeffInputs::new(&p, &d);
            let (pp, pm) = (d.p_plus, d.p_minus);

            // One swap application: (pp, pm) -> (pm, pp); two: back to the
            // original argument pair. With a pure evaluator the double swap
            // must reproduce the originals bitwise, and that purity is what
            // this checks (same inputs, same bits, across all four forms).
            let swap = |(x, y): (f64, f64)| (y, x);
            let args2 = swap(swap((pp, pm)));
            prop_assert_eq!(photon_coeff(&i, args2.0, args2.1), photon_coeff(&i, pp, pm));
            prop_assert_eq!(phonon_coeff(&i, args2.0, args2.1), phonon_coeff(&i, pp, pm));
            prop_assert_eq!(cross_coeff_1(&i, args2.0, args2.1), cross_coeff_1(&i, pp, pm));
            prop_assert_eq!(cross_coeff_2(&i, args2.0, args2.1), cross_coeff_2(&i, pp, pm));

            // The full evaluator routes b and d through exactly one swap.
            let c = EffectiveCoefficients::evaluate(&p, &d).unwrap();
            prop_assert_eq!(c.b1, photon_coeff(&i, pm, pp) + p.kappa_a);
            prop_assert_eq!(c.d1, cross_coeff_1(&i, pm, pp));
            prop_assert_eq!(c.d2, cross_coeff_2(&i, pm, pp));
        }
    }
}
