//! Dense matrices, vectors, factorizations and norms.

mod cholesky;
mod eigen;
mod lu;
mod matrix;
mod norm;
pub mod rng;
mod vector;

pub use cholesky::{energy_norm, is_spd, Cholesky};
pub use eigen::symmetric_eigen;
pub use lu::{inverse, solve, LuFactors, SINGULAR_RTOL};
pub use matrix::{matmul, Matrix};
pub use norm::two_norm;
pub use vector::{
    add, axpy, concat, dot, ensure_finite, norm2, scale_in_place, sub, unit, vec_norm, NormKind,
    Vector,
};
