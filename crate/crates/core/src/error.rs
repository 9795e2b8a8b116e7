//! Error types shared across the crate.

use thiserror::Error;

/// Errors from parameter validation and dressed-state derivation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("rate `{name}` must be non-negative, got {value}")]
    NegativeRate { name: &'static str, value: f64 },
    #[error("`{name}` must be strictly positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("`{name}` must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error("thermal occupation nbar must be >= 0, got {0}")]
    NegativeOccupation(f64),
    #[error("temperature must be >= 0 K, got {0}")]
    NegativeTemperature(f64),
}

/// Errors from effective-coefficient evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoeffError {
    #[error("coefficient `{name}` is not finite (vanishing dressed linewidth?)")]
    NonFinite { name: &'static str },
}

/// Errors from the moment-hierarchy solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MomentError {
    #[error("moment order {0} exceeds the supported maximum of {max}", max = crate::moments::MAX_SUPPORTED_ORDER)]
    OrderTooLarge(usize),
    #[error("order-{order} block is unstable: eigenvalue {eigenvalue} has non-negative real part")]
    Unstable {
        order: usize,
        eigenvalue: num_complex::Complex64,
    },
    #[error("order-{order} block is numerically singular")]
    Singular { order: usize },
    #[error("adaptive integrator failed at t = {t}: step size underflow (dt = {dt})")]
    StepFailure { t: f64, dt: f64 },
    #[error("linear algebra backend error: {0}")]
    Linalg(String),
}

/// Errors from mapping moments to physical observables.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObservableError {
    #[error("moment {name} = {value} has negative real part beyond tolerance; generator assembly bug or severe cutoff artifact")]
    NonPhysical { name: &'static str, value: f64 },
    #[error("moment vector does not contain all indices up to order 4")]
    MissingMoments,
}

/// Errors from the truncated-Fock oracle machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FockError {
    #[error("Fock cutoff must be at least 2, got {0}")]
    CutoffTooSmall(usize),
    #[error("steady-state solve did not converge: residual {residual:.3e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },
    #[error("time integration did not reach the residual target: residual ratio {residual:.3e} after {steps} steps")]
    IntegrationStalled { residual: f64, steps: usize },
    #[error("density matrix is not trace-normalized (trace = {0})")]
    BadTrace(f64),
    #[error("linear algebra backend error: {0}")]
    Linalg(String),
}

/// Errors from the engine registry.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("unknown engine `{0}`; known engines: {1}")]
    UnknownEngine(String, String),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error(transparent)]
    Moment(#[from] MomentError),
    #[error(transparent)]
    Observable(#[from] ObservableError),
    #[error(transparent)]
    Fock(#[from] FockError),
}
