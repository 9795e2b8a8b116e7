//! Adaptive time integration of the block-triangular moment ODE.
//!
//! Dormand-Prince 5(4) embedded pair with a standard step controller. The
//! stiffness at desk scale is mild (rate ratios of order 10²), so an
//! explicit method with error control is adequate.

use num_complex::Complex64 as C64;

use crate::error::MomentError;
use crate::moments::generator::GeneratorBlocks;
use crate::moments::steady::MomentVector;

/// Default relative tolerance of the adaptive controller.
pub const DEFAULT_TOL: f64 = 1e-9;

const ATOL: f64 = 1e-14;
const SAFETY: f64 = 0.9;
const MIN_SCALE: f64 = 0.2;
const MAX_SCALE: f64 = 5.0;

/// Time-ordered accepted states of one integration run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<Vec<C64>>,
    basis: crate::moments::basis::MomentBasis,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn state(&self, i: usize) -> MomentVector {
        MomentVector::from_values(&self.basis, self.states[i].clone())
    }

    pub fn final_state(&self) -> MomentVector {
        self.state(self.len() - 1)
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().unwrap()
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate dx/dt = G x from `init` to `t_final` at relative tolerance
/// `tol` (≤ 0 selects [`DEFAULT_TOL`]). At t = 0 the trajectory holds `init`
/// exactly. Fails with `StepFailure` if the controller cannot meet the
/// tolerance without underflowing the step size.
pub fn evolve(
    gen: &GeneratorBlocks,
    init: &MomentVector,
    t_final: f64,
    tol: f64,
) -> Result<Trajectory, MomentError> {
    let rtol = if tol > 0.0 { tol } else { DEFAULT_TOL };
    let dim = gen.basis().len();
    assert_eq!(init.values().len(), dim);

    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![init.values().to_vec()],
        basis: gen.basis().clone(),
    };
    if t_final == 0.0 {
        return Ok(traj);
    }

    let mut t = 0.0f64;
    let mut y = init.values().to_vec();
    let mut k: Vec<Vec<C64>> = (0..7).map(|_| vec![C64::new(0.0, 0.0); dim]).collect();
    let mut stage = vec![C64::new(0.0, 0.0); dim];

    // initial step from the generator scale
    let mut rate_scale = 0.0f64;
    for n in 1..=gen.max_order() {
        let l = gen.l_block(n);
        for v in l.iter() {
            rate_scale = rate_scale.max(v.norm());
        }
    }
    let mut dt = (0.1 / rate_scale.max(1e-12)).min(t_final);
    let dt_min = t_final * 1e-14;

    gen.apply(&y, &mut k[0]);
    while t < t_final {
        if dt < dt_min {
            return Err(MomentError::StepFailure { t, dt });
        }
        if t + dt > t_final {
            dt = t_final - t;
        }

        for s in 1..7 {
            for i in 0..dim {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        acc += kj[i] * (a * dt);
                    }
                }
                stage[i] = acc;
            }
            let _ = C; // stage times unused: the generator is autonomous
            let (head, tail) = k.split_at_mut(s);
            let _ = head;
            gen.apply(&stage, &mut tail[0]);
        }

        // 5th-order solution and embedded error estimate
        let mut err = 0.0f64;
        for i in 0..dim {
            let mut y5 = y[i];
            let mut y4 = y[i];
            for (j, kj) in k.iter().enumerate() {
                if B5[j] != 0.0 {
                    y5 += kj[i] * (B5[j] * dt);
                }
                if B4[j] != 0.0 {
                    y4 += kj[i] * (B4[j] * dt);
                }
            }
            let scale = ATOL + rtol * y5.norm().max(y[i].norm());
            err = err.max((y5 - y4).norm() / scale);
            stage[i] = y5;
        }

        if err <= 1.0 {
            t += dt;
            std::mem::swap(&mut y, &mut stage);
            traj.times.push(t);
            traj.states.push(y.clone());
            gen.apply(&y, &mut k[0]);
        }
        let grow = SAFETY * err.max(1e-10).powf(-0.2);
        dt *= grow.clamp(MIN_SCALE, MAX_SCALE);
    }

    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::EffectiveCoefficients;
    use crate::moments::basis::MomentBasis;
    use crate::moments::generator::assemble_generator;
    use crate::moments::steady::{stability_report, steady_state, MomentVector};
    use crate::params::ModelParams;
    use approx::assert_abs_diff_eq;

    fn generator_for(p: &ModelParams, max_order: usize) -> GeneratorBlocks {
        let d = p.dressed().unwrap();
        let c = EffectiveCoefficients::evaluate(p, &d).unwrap();
        let basis = MomentBasis::new(max_order).unwrap();
        assemble_generator(&c, p.delta1, p.omega_m, &basis)
    }

    #[test]
    fn zero_time_returns_init_exactly() {
        let p = ModelParams::demo();
        let gen = generator_for(&p, 2);
        let init = MomentVector::thermal_product(gen.basis(), 0.3, 1.2);
        let traj = evolve(&gen, &init, 0.0, 1e-9).unwrap();
        assert_eq!(traj.len(), 1);
        assert_eq!(traj.final_state().values(), init.values());
    }

    #[test]
    fn decoupled_phonon_relaxation_matches_closed_form() {
        // g = λ = 0: <b†b>(t) = n̄ + (n₀ − n̄) e^(−2 κ_b t)
        let p = ModelParams {
            g: 0.0,
            lambda: 0.0,
            nbar: 2.0,
            ..ModelParams::demo()
        };
        let gen = generator_for(&p, 2);
        let n0 = 5.0;
        let init = MomentVector::thermal_product(gen.basis(), 0.0, n0);
        let t_final = 120.0;
        let traj = evolve(&gen, &init, t_final, 1e-9).unwrap();
        for i in 0..traj.len() {
            let t = traj.times()[i];
            let nb = traj.state(i).get(0, 0, 1, 1).unwrap();
            let expect = p.nbar + (n0 - p.nbar) * (-2.0 * p.kappa_b * t).exp();
            assert_abs_diff_eq!(nb.re, expect, epsilon = 1e-6);
            assert_abs_diff_eq!(nb.im, 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn long_time_limit_reaches_the_steady_state() {
        let p = ModelParams::demo();
        let gen = generator_for(&p, 2);
        let steady = steady_state(&gen).unwrap();
        let report = stability_report(&gen).unwrap();
        let tol = 1e-9;
        let t_large = 20.0 / report.slowest_rate();
        let init = MomentVector::unit(gen.basis());
        let traj = evolve(&gen, &init, t_large, tol).unwrap();
        let xf = traj.final_state();
        let err: f64 = xf
            .values()
            .iter()
            .zip(steady.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let scale: f64 = steady.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(
            err <= 10.0 * tol * scale.max(1.0) + 1e-8,
            "residual distance {err}"
        );
        // conjugation symmetry is preserved by the dynamics
        assert!(xf.conjugation_defect() < 1e-8);
    }

    #[test]
    fn unstable_generators_still_integrate_transients() {
        // lossless decoupled case: no steady state, but transients are defined
        let p = ModelParams {
            g: 0.0,
            lambda: 0.0,
            kappa_a: 0.0,
            kappa_b: 0.0,
            ..ModelParams::demo()
        };
        let gen = generator_for(&p, 2);
        let init = MomentVector::thermal_product(gen.basis(), 1.0, 1.0);
        let traj = evolve(&gen, &init, 5.0, 1e-9).unwrap();
        let nb = traj.final_state().get(0, 0, 1, 1).unwrap();
        assert_abs_diff_eq!(nb.re, 1.0, epsilon = 1e-9); // undamped, conserved
    }
}
