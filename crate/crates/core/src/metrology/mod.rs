//! Probability models, classical and quantum Fisher information, and the
//! sensitivity bounds built from them.

use thiserror::Error;

use crate::numerics::NumericsError;
use crate::probes::StateError;

mod axis;
mod bounds;
mod fisher;
mod model;
mod povm;
mod qfi;

pub use axis::{optimal_axis, sensitivity_matrix};
pub use bounds::{bound_heisenberg, bound_shot_noise, fisher_lower_bound_moment, quantum_cramer_rao};
pub use fisher::{
    crlb_saturation_residual, fisher_information, ContributionKind, DerivativeMethod, FisherReport,
    OutcomeContribution, D_FLOOR, P_FLOOR,
};
pub use model::{ProbabilityModel, PROB_CLAMP};
pub use povm::{Povm, PovmElement, POVM_TOL};
pub use qfi::{
    qfi_density, qfi_family, qfi_mixed, qfi_pure, qfi_state, sld, sld_density, sld_residual, FAMILY_OVERLAP_MIN,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetrologyError {
    #[error("POVM has no elements")]
    EmptyPovm,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("POVM element {outcome} is not positive (min eigenvalue {min:e})")]
    NotPositive { outcome: usize, min: f64 },
    #[error("POVM elements do not sum to the identity (defect {defect:e})")]
    Incomplete { defect: f64 },
    #[error("observable is not diagonal in the POVM (defect {defect:e})")]
    NotDiagonalInPovm { defect: f64 },
    #[error("observable has zero variance at this phase; the moment bound is undefined")]
    ZeroVariance,
    #[error("spectrum of the state family is not smooth at θ = {theta} (block overlap {overlap:.3e})")]
    NonSmoothSpectrum { theta: f64, overlap: f64 },
    #[error("finite-difference step must be positive and finite, got {0}")]
    Step(f64),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    State(#[from] StateError),
}

pub type Result<T, E = MetrologyError> = std::result::Result<T, E>;
