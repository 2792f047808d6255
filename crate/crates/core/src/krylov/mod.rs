//! Krylov and stationary solvers.

mod arnoldi;
mod cg;
mod config;
mod fixed_point;
mod gmres;
mod history;
mod operator;
mod poly;

pub use cg::{cg, cg_with_observer, CgMonitor};
pub use config::{KrylovConfig, Method, Side};
pub use fixed_point::fixed_point;
pub use gmres::{fgmres, gmres, minimal_residuals, MinimalResiduals};
pub use history::{ConvergenceHistory, Termination};
pub use operator::{
    to_matrix, ApplyStatus, ComposedOperator, IdentityPreconditioner, LinearOperator,
    Preconditioner,
};
pub use poly::{apply_consistent_polynomial, PolynomialCoeffs};
