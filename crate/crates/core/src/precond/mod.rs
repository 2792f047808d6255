//! Block preconditioners for 2x2 systems.

mod build;
mod explicit;
mod spec;

pub use build::{build, diagonal_schur, schur_approximation, ApplyablePreconditioner};
pub use explicit::{
    assembled_preconditioner, error_propagator, explicit_inverse, preconditioned_matrix,
    residual_propagator,
};
pub use spec::{Family, InnerSolve, PreconditionerSpec, SchurApprox, DEFAULT_INNER_MAX_ITER};
