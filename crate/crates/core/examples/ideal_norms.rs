//! Sampled and minimized estimates of ideal GMRES norms for the block
//! Jacobi preconditioned operator and its Schur complement pieces.

use blockkrylov::krylov::Side;
use blockkrylov::precond::{build, preconditioned_matrix, PreconditionerSpec};
use blockkrylov::problems::random_block;
use blockkrylov::theory::{ideal_norm, IdealOptions};

fn main() -> blockkrylov::Result<()> {
    let (sys, _) = random_block(8, 5, 2, 10.0)?;
    let p = build(&sys, &PreconditionerSpec::block_jacobi())?;
    let b = preconditioned_matrix(&sys, &p, Side::Left);
    let opts = IdealOptions::default();
    for d in 1..=6 {
        let est = ideal_norm(&b, d, &opts)?;
        println!("d = {d}: sampled {:.4e}, minimized {:.4e}", est.sampled, est.minimized);
    }
    Ok(())
}
