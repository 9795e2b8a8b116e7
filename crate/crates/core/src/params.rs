//! Physical model parameters and derived dressed-state quantities.
//!
//! All rates and frequencies are expressed in units of the qubit spontaneous
//! decay rate γ (γ = 1 by convention). Conversions from absolute units happen
//! at the CLI boundary, never here.

use crate::error::ParamError;

/// Reduced Planck constant (J s).
const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant (J / K), exact SI value.
const KB: f64 = 1.380_649e-23;

/// Ratio treated as "much greater than" when classifying the operating regime.
const REGIME_MARGIN: f64 = 10.0;

/// Physical rates and frequencies of the full qubit + cavity + resonator
/// model, in units of γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Qubit spontaneous decay rate γ (the unit rate; 1.0 by convention).
    pub gamma: f64,
    /// Qubit dephasing rate γ_c.
    pub gamma_c: f64,
    /// Qubit-cavity coupling g.
    pub g: f64,
    /// Qubit-phonon coupling λ.
    pub lambda: f64,
    /// Rabi frequency Ω of the external drive.
    pub omega_rabi: f64,
    /// Laser-qubit detuning Δ = ω₀ − ω_L.
    pub delta: f64,
    /// Laser-cavity detuning Δ₁ = ω_L − ω_c.
    pub delta1: f64,
    /// Phonon frequency ω.
    pub omega_m: f64,
    /// Cavity damping rate κ_a.
    pub kappa_a: f64,
    /// Phonon damping rate κ_b.
    pub kappa_b: f64,
    /// Mean thermal phonon occupation n̄ of the mechanical bath.
    pub nbar: f64,
}

impl ModelParams {
    /// Demonstration parameter set: strong qubit-cavity coupling with the
    /// drive tuned one phonon sideband below the qubit transition. This is
    /// the default set shipped with the CLI.
    pub fn demo() -> Self {
        Self {
            gamma: 1.0,
            gamma_c: 0.3,
            g: 3.0,
            lambda: 5.0,
            omega_rabi: 50.0,
            delta: -26.3,
            delta1: 50.0,
            omega_m: 50.0,
            kappa_a: 0.09,
            kappa_b: 0.009,
            nbar: 2.0,
        }
    }

    /// Check the type invariants: rates non-negative, Ω and ω strictly
    /// positive, n̄ non-negative, everything finite.
    pub fn validate(&self) -> Result<(), ParamError> {
        let finite = [
            ("gamma", self.gamma),
            ("gamma_c", self.gamma_c),
            ("g", self.g),
            ("lambda", self.lambda),
            ("omega_rabi", self.omega_rabi),
            ("delta", self.delta),
            ("delta1", self.delta1),
            ("omega_m", self.omega_m),
            ("kappa_a", self.kappa_a),
            ("kappa_b", self.kappa_b),
            ("nbar", self.nbar),
        ];
        for (name, value) in finite {
            if !value.is_finite() {
                return Err(ParamError::NonFinite { name, value });
            }
        }
        for (name, value) in [
            ("gamma", self.gamma),
            ("gamma_c", self.gamma_c),
            ("kappa_a", self.kappa_a),
            ("kappa_b", self.kappa_b),
        ] {
            if value < 0.0 {
                return Err(ParamError::NegativeRate { name, value });
            }
        }
        for (name, value) in [("omega_rabi", self.omega_rabi), ("omega_m", self.omega_m)] {
            if value <= 0.0 {
                return Err(ParamError::NonPositive { name, value });
            }
        }
        if self.nbar < 0.0 {
            return Err(ParamError::NegativeOccupation(self.nbar));
        }
        Ok(())
    }

    /// Diagnostics for the adiabatic-elimination operating regime. The
    /// reduced two-mode description assumes Ω ≫ γ ≫ κ_a, κ_b and
    /// Ω ≫ max(g, λ); these flags report whether each separation holds by
    /// at least a factor of ten. Informational only: nothing refuses to run
    /// outside the regime.
    pub fn regime(&self) -> RegimeDiagnostics {
        let drive_over_decay = self.omega_rabi / self.gamma;
        let decay_over_damping = self.gamma / self.kappa_a.max(self.kappa_b);
        let drive_over_coupling = self.omega_rabi / self.g.abs().max(self.lambda.abs());
        RegimeDiagnostics {
            strong_driving: drive_over_decay >= REGIME_MARGIN,
            good_cavity: decay_over_damping >= REGIME_MARGIN,
            weak_coupling: drive_over_coupling >= REGIME_MARGIN,
            drive_over_decay,
            decay_over_damping,
            drive_over_coupling,
        }
    }

    /// Derive the dressed-state quantities. Fails when Ω ≤ 0 (the dressing
    /// transformation is undefined without a drive).
    pub fn dressed(&self) -> Result<DressedParams, ParamError> {
        if !self.omega_rabi.is_finite() {
            return Err(ParamError::NonFinite {
                name: "omega_rabi",
                value: self.omega_rabi,
            });
        }
        if self.omega_rabi <= 0.0 {
            return Err(ParamError::NonPositive {
                name: "omega_rabi",
                value: self.omega_rabi,
            });
        }

        // Branch choice: 2θ = arccot(Δ/2Ω) taken in (0, π), so sin 2θ ≥ 0.
        let two_theta = std::f64::consts::FRAC_PI_2 - (self.delta / (2.0 * self.omega_rabi)).atan();
        let theta = 0.5 * two_theta;
        let omega_r = (self.delta / 2.0).hypot(self.omega_rabi);

        // On this branch the trigonometry is algebraic in (Δ, Ω, Ω_R):
        // sin 2θ = Ω/Ω_R ≥ 0, cos 2θ = (Δ/2)/Ω_R. Using these instead of
        // libm trig makes the Δ = 0 symmetry (γ₊ = γ₋, P± = 1/2) exact.
        let s2 = self.omega_rabi / omega_r;
        let c2 = 0.5 * self.delta / omega_r;
        let sin_sq = 0.5 * (1.0 - c2); // sin²θ
        let cos_sq = 0.5 * (1.0 + c2); // cos²θ

        let gamma0 = 0.25 * (self.gamma * s2 * s2 + self.gamma_c * c2 * c2);
        let gamma_plus = self.gamma * cos_sq * cos_sq + 0.25 * self.gamma_c * s2 * s2;
        let gamma_minus = self.gamma * sin_sq * sin_sq + 0.25 * self.gamma_c * s2 * s2;
        let gamma_perp = 4.0 * gamma0 + gamma_plus + gamma_minus;
        let gamma_par = self.gamma * (1.0 + c2 * c2) + self.gamma_c * s2 * s2;

        // p_minus computed as 1 - p_plus so the pair sums to 1.0 exactly.
        let p_plus = gamma_minus / (gamma_plus + gamma_minus);
        let p_minus = 1.0 - p_plus;

        Ok(DressedParams {
            theta,
            omega_r,
            gamma0,
            gamma_plus,
            gamma_minus,
            gamma_perp,
            gamma_par,
            p_plus,
            p_minus,
        })
    }
}

/// Regime-validity flags (see [`ModelParams::regime`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeDiagnostics {
    /// Ω ≫ γ.
    pub strong_driving: bool,
    /// γ ≫ κ_a, κ_b.
    pub good_cavity: bool,
    /// Ω ≫ max(g, λ).
    pub weak_coupling: bool,
    pub drive_over_decay: f64,
    pub decay_over_damping: f64,
    pub drive_over_coupling: f64,
}

impl RegimeDiagnostics {
    /// True when every separation of scales holds.
    pub fn valid(&self) -> bool {
        self.strong_driving && self.good_cavity && self.weak_coupling
    }
}

/// Dressed-state quantities of the driven qubit: mixing angle, generalized
/// Rabi frequency, dressed decay rates and populations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedParams {
    /// Dressing angle θ, with 2θ ∈ (0, π).
    pub theta: f64,
    /// Generalized Rabi frequency Ω_R = sqrt((Δ/2)² + Ω²).
    pub omega_r: f64,
    /// Dressed dephasing-like rate γ₀ = (γ sin²2θ + γ_c cos²2θ)/4.
    pub gamma0: f64,
    /// Dressed downward rate γ₊ = γ cos⁴θ + (γ_c/4) sin²2θ.
    pub gamma_plus: f64,
    /// Dressed upward rate γ₋ = γ sin⁴θ + (γ_c/4) sin²2θ.
    pub gamma_minus: f64,
    /// Transverse dressed linewidth Γ⊥ = 4γ₀ + γ₊ + γ₋.
    pub gamma_perp: f64,
    /// Longitudinal dressed linewidth Γ∥ = γ(1 + cos²2θ) + γ_c sin²2θ.
    pub gamma_par: f64,
    /// Steady dressed population P₊ = γ₋/(γ₊ + γ₋).
    pub p_plus: f64,
    /// Steady dressed population P₋ = γ₊/(γ₊ + γ₋); stored as 1 − P₊.
    pub p_minus: f64,
}

/// Bose-Einstein occupation n̄ = 1/(exp(ħω/k_B T) − 1) for a mode at
/// angular frequency `omega_m` (rad/s) and temperature `temperature` (K).
/// Returns 0 at T = 0.
pub fn nbar_from_temperature(omega_m: f64, temperature: f64) -> Result<f64, ParamError> {
    if !omega_m.is_finite() || omega_m <= 0.0 {
        return Err(ParamError::NonPositive {
            name: "omega_m",
            value: omega_m,
        });
    }
    if !temperature.is_finite() || temperature < 0.0 {
        return Err(ParamError::NegativeTemperature(temperature));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR * omega_m / (KB * temperature);
    Ok(1.0 / x.exp_m1())
}
