//! Normally-ordered moment hierarchy: basis enumeration, generator assembly,
//! steady-state and transient solvers.

pub mod basis;
pub mod evolve;
pub mod generator;
pub mod steady;

pub use basis::{MomentBasis, MomentIndex, MAX_SUPPORTED_ORDER};
pub use evolve::{evolve, Trajectory, DEFAULT_TOL};
pub use generator::{assemble_generator, GeneratorBlocks};
pub use steady::{
    stability_report, steady_state, MomentVector, OrderAbscissa, StabilityReport, EPS_STAB,
};
