//! Full qubit + photon + phonon Lindblad generator in the bare basis.
//!
//! Laser-frame Hamiltonian
//!   H = Δ S_z − Δ₁ a†a + ω b†b + g(a†S⁻ + aS⁺) + Ω(S⁺ + S⁻) + λ S_z(b† + b),
//! with dissipators D[O]ρ = OρO† − ½{O†O, ρ} at rates 2γ on S⁻, 2γ_c on S_z,
//! 2κ_a on a, 2κ_b(1+n̄) on b and 2κ_b n̄ on b†. The factors of two translate
//! the −r[O†, Oρ] + H.c. rate convention into D-form; the dephasing
//! normalization (rate 2γ_c on S_z with S_z eigenvalues ±½) is pinned so the
//! secular dressed-frame rates γ₀, γ± are recovered exactly.

use num_complex::Complex64 as C64;

use crate::error::FockError;
use crate::fock::ops::{BasisLayout, ModeOp, ProductTerm, Superoperator};
use crate::fock::FockConfig;
use crate::params::ModelParams;

use ModeOp::{
    PhononLower as B, PhononRaise as Bd, PhotonLower as A, PhotonRaise as Ad, QubitLower as Sm,
    QubitRaise as Sp, QubitZ as Sz,
};

/// Assemble the full-model superoperator at cutoffs (n_a, n_b); Hilbert
/// dimension is 2·n_a·n_b.
pub fn full_generator(p: &ModelParams, cfg: &FockConfig) -> Result<Superoperator, FockError> {
    cfg.validate()?;
    let layout = BasisLayout::QubitTwoMode {
        n_a: cfg.n_a,
        n_b: cfg.n_b,
    };

    let mut terms: Vec<ProductTerm> = Vec::new();

    // -i[H, ρ]: each Hamiltonian monomial contributes -i c (ops)ρ + i c ρ(ops)
    let hamiltonian: [(f64, &[ModeOp], &str); 9] = [
        (p.delta, &[Sz], "H: Delta Sz"),
        (-p.delta1, &[Ad, A], "H: -Delta1 adag a"),
        (p.omega_m, &[Bd, B], "H: omega bdag b"),
        (p.g, &[Ad, Sm], "H: g adag S-"),
        (p.g, &[A, Sp], "H: g a S+"),
        (p.omega_rabi, &[Sp], "H: Omega S+"),
        (p.omega_rabi, &[Sm], "H: Omega S-"),
        (p.lambda, &[Sz, Bd], "H: lambda Sz bdag"),
        (p.lambda, &[Sz, B], "H: lambda Sz b"),
    ];
    for (c, ops, label) in hamiltonian {
        if c == 0.0 {
            continue;
        }
        terms.push(ProductTerm::new(
            C64::new(0.0, -c),
            ops,
            &[],
            format!("{label} (left)"),
        ));
        terms.push(ProductTerm::new(
            C64::new(0.0, c),
            &[],
            ops,
            format!("{label} (right)"),
        ));
    }

    // dissipators
    let dissipators: [(f64, ModeOp, &str); 5] = [
        (2.0 * p.gamma, Sm, "decay D[S-]"),
        (2.0 * p.gamma_c, Sz, "dephasing D[Sz]"),
        (2.0 * p.kappa_a, A, "cavity D[a]"),
        (2.0 * p.kappa_b * (1.0 + p.nbar), B, "phonon D[b]"),
        (2.0 * p.kappa_b * p.nbar, Bd, "phonon D[bdag]"),
    ];
    for (rate, op, label) in dissipators {
        if rate == 0.0 {
            continue;
        }
        let od = op.dagger();
        terms.push(ProductTerm::new(
            C64::new(rate, 0.0),
            &[op],
            &[od],
            format!("{label}: O rho Odag"),
        ));
        terms.push(ProductTerm::new(
            C64::new(-0.5 * rate, 0.0),
            &[od, op],
            &[],
            format!("{label}: -OdagO rho / 2"),
        ));
        terms.push(ProductTerm::new(
            C64::new(-0.5 * rate, 0.0),
            &[],
            &[od, op],
            format!("{label}: -rho OdagO / 2"),
        ));
    }

    Ok(Superoperator::new(layout, terms))
}
