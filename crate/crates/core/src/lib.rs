//! Steady-state and transient quantum correlations between an optical cavity
//! mode and a nanomechanical phonon mode, mediated by a coherently driven
//! two-level quantum dot.
//!
//! In the strong-driving, good-cavity regime the dot variables are fast and
//! the photon-phonon pair obeys an effective linear dynamics characterized
//! by eight complex rates. Every normally-ordered moment ⟨a†ʲaᵏb†ˡbᵐ⟩ then
//! satisfies a closed linear equation of motion, and the hierarchy is
//! block-triangular in the total order. This crate
//!
//! * derives the dressed-state rates and the eight effective coefficients
//!   ([`params`], [`coeffs`]),
//! * assembles and solves the moment hierarchy for steady states and
//!   transients ([`moments`]),
//! * maps moments to occupations, zero-delay g⁽²⁾ correlations and the
//!   Cauchy-Schwarz figure of merit ([`observables`]),
//! * provides two independent truncated-Fock master-equation oracles, the
//!   reduced two-mode generator and the full qubit + photon + phonon
//!   Lindblad model ([`fock`]),
//! * exposes all three backends behind one [`engine::SteadyStateEngine`]
//!   trait, registered by name and selectable at runtime.
//!
//! All rates are in units of the qubit decay rate γ.

// Linked LAPACK/BLAS backends for ndarray-linalg and ndarray::dot.
extern crate blas_src;
extern crate openblas_src;

pub mod coeffs;
pub mod engine;
pub mod error;
pub mod fock;
pub mod moments;
pub mod observables;
pub mod params;

pub use coeffs::EffectiveCoefficients;
pub use engine::{
    create_engine, engine_names, registry, EngineDiagnostics, EngineOptions, EngineOutcome,
    FullFockEngine, MomentEngine, ReducedFockEngine, SteadyStateEngine,
};
pub use error::{CoeffError, EngineError, FockError, MomentError, ObservableError, ParamError};
pub use fock::{
    evolve_to_steady, fock_moments, full_generator, reduced_generator, steady_state as fock_steady_state,
    BasisLayout, DensityMatrix, FockConfig, FockMoments, Superoperator,
};
pub use moments::{
    assemble_generator, evolve, stability_report, steady_state, GeneratorBlocks, MomentBasis,
    MomentIndex, MomentVector, StabilityReport, Trajectory,
};
pub use observables::{correlations, CorrelationSet};
pub use params::{nbar_from_temperature, DressedParams, ModelParams, RegimeDiagnostics};
