pub mod block;
pub mod cli;
pub mod dense;
pub mod error;
pub mod krylov;
pub mod mtx;
pub mod precond;
pub mod problems;
pub mod theory;

pub use block::{BlockOp, BlockSystem2x2, BlockVector, SchurBlock};
pub use error::{Error, Result};
