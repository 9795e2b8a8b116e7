//! Direct steady-state solve of a trace-annihilating superoperator.
//!
//! The kernel of L is pinned down by augmenting with a rank-one trace term:
//! with t = vec(I)/√d, the system (L + σ t t^H) x = σ t has the unique
//! solution x = steady state normalized to Tr = √d, because t^H L = 0
//! (trace annihilation) and the steady direction is L's kernel. The
//! augmented system is solved matrix-free with preconditioned BiCGSTAB.

use ndarray::Array2;
use ndarray_linalg::{Eig, Inverse};
use num_complex::Complex64 as C64;

use crate::error::FockError;
use crate::fock::ops::Superoperator;
use crate::fock::DensityMatrix;

const MAX_ITERS: usize = 20_000;
/// Residual target of the augmented solve. The limiting accuracy of the
/// steady moments scales with this times the generator's condition, so it
/// is kept near rounding level.
const RTOL_TARGET: f64 = 1e-12;
/// A solve that stalls above the target but below this is still accepted;
/// the achieved residual is reported in the outcome.
const RTOL_ACCEPT: f64 = 1e-8;

/// Converged steady state plus solver diagnostics.
#[derive(Debug, Clone)]
pub struct SteadyOutcome {
    pub rho: DensityMatrix,
    /// Frobenius norm of L(ρ) at the returned (normalized) state.
    pub residual: f64,
    pub iterations: usize,
    /// Smallest eigenvalue of the Hermitian part; negative values at
    /// rounding scale are expected for the reduced generator.
    pub min_eigenvalue: f64,
}

fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

fn norm(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

enum Precond {
    /// Inverse of the vectorized diagonal.
    Jacobi(Vec<C64>),
    /// Inverse of the one-sided part G_L ρ + ρ G_R via eigendecomposition.
    OneSided {
        v: Array2<C64>,
        v_inv: Array2<C64>,
        w: Array2<C64>,
        w_inv: Array2<C64>,
        inv_denom: Array2<C64>,
    },
}

impl Precond {
    fn jacobi(l: &Superoperator, sigma: f64) -> Self {
        let d = l.dim();
        let mut diag = l.diagonal();
        for i in 0..d {
            diag[i * d + i] += sigma / d as f64;
        }
        let scale = diag.iter().map(|v| v.norm()).fold(0.0f64, f64::max).max(1e-12);
        let floor = 1e-3 * scale;
        let inv = diag
            .into_iter()
            .map(|v| {
                let v = if v.norm() < floor {
                    v + C64::new(-floor, 0.0)
                } else {
                    v
                };
                C64::new(1.0, 0.0) / v
            })
            .collect();
        Precond::Jacobi(inv)
    }

    fn one_sided(l: &Superoperator) -> Result<Self, FockError> {
        let (g_left, g_right) = l.one_sided_split();
        let (lam, v) = g_left
            .eig()
            .map_err(|e| FockError::Linalg(e.to_string()))?;
        let (mu, w) = g_right
            .eig()
            .map_err(|e| FockError::Linalg(e.to_string()))?;
        let v_inv = v.inv().map_err(|e| FockError::Linalg(e.to_string()))?;
        let w_inv = w.inv().map_err(|e| FockError::Linalg(e.to_string()))?;
        let d = l.dim();
        let scale = lam
            .iter()
            .chain(mu.iter())
            .map(|z| z.norm())
            .fold(0.0f64, f64::max)
            .max(1e-12);
        let floor = 1e-8 * scale;
        let inv_denom = Array2::from_shape_fn((d, d), |(i, j)| {
            let mut den = lam[i] + mu[j];
            if den.norm() < floor {
                den = C64::new(-floor, 0.0);
            }
            C64::new(1.0, 0.0) / den
        });
        Ok(Precond::OneSided {
            v,
            v_inv,
            w,
            w_inv,
            inv_denom,
        })
    }

    fn apply(&self, b: &[C64], out: &mut [C64], d: usize) {
        match self {
            Precond::Jacobi(inv) => {
                for (o, (x, m)) in out.iter_mut().zip(b.iter().zip(inv)) {
                    *o = x * m;
                }
            }
            Precond::OneSided {
                v,
                v_inv,
                w,
                w_inv,
                inv_denom,
            } => {
                let bm = Array2::from_shape_vec((d, d), b.to_vec()).unwrap();
                // solve G_L X + X G_R = B: X = V [(V⁻¹ B W) ∘ invdenom] W⁻¹
                let mut y = v_inv.dot(&bm).dot(w);
                y.zip_mut_with(inv_denom, |a, &m| *a *= m);
                let x = v.dot(&y).dot(w_inv);
                out.copy_from_slice(x.as_slice().unwrap());
            }
        }
    }
}

struct AugmentedSystem<'a> {
    l: &'a Superoperator,
    trace_dir: Vec<C64>,
    sigma: f64,
}

impl<'a> AugmentedSystem<'a> {
    fn new(l: &'a Superoperator) -> Self {
        let d = l.dim();
        let mut trace_dir = vec![C64::new(0.0, 0.0); d * d];
        let amp = 1.0 / (d as f64).sqrt();
        for i in 0..d {
            trace_dir[i * d + i] = C64::new(amp, 0.0);
        }
        // σ at the typical damping scale keeps the augmentation conditioned
        let diag = l.diagonal();
        let mean: f64 = diag.iter().map(|v| v.norm()).sum::<f64>() / diag.len() as f64;
        let sigma = mean.max(1e-6);
        Self {
            l,
            trace_dir,
            sigma,
        }
    }

    fn apply(&self, x: &[C64], out: &mut [C64]) {
        self.l.apply(x, out);
        let proj = dot(&self.trace_dir, x) * self.sigma;
        for (o, t) in out.iter_mut().zip(&self.trace_dir) {
            *o += proj * t;
        }
    }
}

fn bicgstab(
    sys: &AugmentedSystem,
    precond: &Precond,
    d: usize,
    max_iters: usize,
) -> Result<(Vec<C64>, usize), FockError> {
    let n = d * d;
    let b: Vec<C64> = sys.trace_dir.iter().map(|t| t * sys.sigma).collect();
    let b_norm = norm(&b);
    let target = RTOL_TARGET * b_norm;

    let mut x = sys.trace_dir.clone();
    let mut r = vec![C64::new(0.0, 0.0); n];
    sys.apply(&x, &mut r);
    for (ri, bi) in r.iter_mut().zip(&b) {
        *ri = bi - *ri;
    }
    let mut r_hat = r.clone();
    let mut p = r.clone();
    let mut v = vec![C64::new(0.0, 0.0); n];
    let mut p_hat = vec![C64::new(0.0, 0.0); n];
    let mut s_hat = vec![C64::new(0.0, 0.0); n];
    let mut t_vec = vec![C64::new(0.0, 0.0); n];
    let mut rho_old = dot(&r_hat, &r);

    for iter in 0..max_iters {
        if norm(&r) <= target {
            return Ok((x, iter));
        }
        if rho_old.norm() < 1e-280 {
            // shadow-vector breakdown: restart with the current residual
            r_hat.copy_from_slice(&r);
            rho_old = dot(&r_hat, &r);
            p.copy_from_slice(&r);
        }
        precond.apply(&p, &mut p_hat, d);
        sys.apply(&p_hat, &mut v);
        let alpha_den = dot(&r_hat, &v);
        if alpha_den.norm() < 1e-280 {
            r_hat.copy_from_slice(&r);
            rho_old = dot(&r_hat, &r);
            p.copy_from_slice(&r);
            continue;
        }
        let alpha = rho_old / alpha_den;
        // s = r - alpha v  (reuse r)
        for (ri, vi) in r.iter_mut().zip(&v) {
            *ri -= alpha * vi;
        }
        if norm(&r) <= target {
            for (xi, pi) in x.iter_mut().zip(&p_hat) {
                *xi += alpha * pi;
            }
            return Ok((x, iter + 1));
        }
        precond.apply(&r, &mut s_hat, d);
        sys.apply(&s_hat, &mut t_vec);
        let tt = dot(&t_vec, &t_vec);
        if tt.norm() < 1e-280 {
            let res = norm(&r) / b_norm;
            if res <= RTOL_ACCEPT {
                return Ok((x, iter));
            }
            return Err(FockError::NoConvergence {
                residual: res,
                iterations: iter,
            });
        }
        let omega = dot(&t_vec, &r) / tt;
        for i in 0..n {
            x[i] += alpha * p_hat[i] + omega * s_hat[i];
        }
        for (ri, ti) in r.iter_mut().zip(&t_vec) {
            *ri -= omega * ti;
        }
        let rho_new = dot(&r_hat, &r);
        let beta = (rho_new / rho_old) * (alpha / omega);
        rho_old = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
    }
    let res = norm(&r) / b_norm;
    if res <= RTOL_ACCEPT {
        return Ok((x, max_iters));
    }
    Err(FockError::NoConvergence {
        residual: res,
        iterations: max_iters,
    })
}

/// Solve L(ρ) = 0 with Tr ρ = 1. The preconditioner is chosen by structure:
/// the reduced two-mode generator is diagonally dominated in the vectorized
/// basis (Jacobi), while the strongly driven full model needs its one-sided
/// part inverted exactly (eigendecomposition of G_L and G_R).
pub fn steady_state(l: &Superoperator) -> Result<SteadyOutcome, FockError> {
    let d = l.dim();
    let sys = AugmentedSystem::new(l);

    let attempt = |precond: &Precond| bicgstab(&sys, precond, d, MAX_ITERS);

    let (x, iterations) = if l.layout().has_qubit() {
        attempt(&Precond::one_sided(l)?)?
    } else {
        match attempt(&Precond::jacobi(l, sys.sigma)) {
            Ok(res) => res,
            Err(_) => attempt(&Precond::one_sided(l)?)?,
        }
    };

    let mut rho = DensityMatrix {
        layout: l.layout(),
        data: Array2::from_shape_vec((d, d), x).unwrap(),
    };
    rho.hermitize();
    rho.normalize()?;
    let flat: Vec<C64> = rho.data.iter().copied().collect();
    let residual = l.residual_norm(&flat);
    let min_eigenvalue = rho.min_eigenvalue()?;
    Ok(SteadyOutcome {
        rho,
        residual,
        iterations,
        min_eigenvalue,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::EffectiveCoefficients;
    use crate::fock::{full_generator, reduced_generator, FockConfig};
    use crate::params::ModelParams;
    use approx::assert_relative_eq;

    #[test]
    fn thermal_fixed_point_of_the_reduced_generator() {
        let p = ModelParams {
            g: 0.0,
            lambda: 0.0,
            nbar: 0.8,
            ..ModelParams::demo()
        };
        let d = p.dressed().unwrap();
        let c = EffectiveCoefficients::evaluate(&p, &d).unwrap();
        let cfg = FockConfig {
            n_a: 3,
            n_b: 40,
            ..FockConfig::default()
        };
        let l = reduced_generator(&c, p.delta1, p.omega_m, &cfg).unwrap();
        let out = steady_state(&l).unwrap();
        // <b†b> against the analytic thermal value
        let mut nb = 0.0;
        for na in 0..cfg.n_a {
            for b in 0..cfg.n_b {
                let i = l.layout().flat(0, na, b);
                nb += b as f64 * out.rho.data[(i, i)].re;
            }
        }
        assert_relative_eq!(nb, p.nbar, max_relative = 1e-8);
        assert!(out.residual < 1e-8);
        assert!(out.min_eigenvalue > -1e-9);
    }

    #[test]
    fn full_model_thermal_fixed_point_without_drive() {
        let p = ModelParams {
            omega_rabi: 1e-9,
            g: 0.0,
            lambda: 0.0,
            nbar: 0.5,
            ..ModelParams::demo()
        };
        let cfg = FockConfig {
            n_a: 2,
            n_b: 24,
            ..FockConfig::default()
        };
        let l = full_generator(&p, &cfg).unwrap();
        let out = steady_state(&l).unwrap();
        let layout = l.layout();
        let mut nb = 0.0;
        let mut excited = 0.0;
        for q in 0..2 {
            for na in 0..cfg.n_a {
                for b in 0..cfg.n_b {
                    let i = layout.flat(q, na, b);
                    nb += b as f64 * out.rho.data[(i, i)].re;
                    if q == 1 {
                        excited += out.rho.data[(i, i)].re;
                    }
                }
            }
        }
        assert_relative_eq!(nb, p.nbar, max_relative = 1e-6);
        assert!(excited < 1e-9);
        assert!(out.min_eigenvalue > -1e-9);
    }
}
