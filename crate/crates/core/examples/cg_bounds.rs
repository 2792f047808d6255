//! Block-LDU preconditioned CG on an SPD block system, bracketed by CG on
//! the preconditioned Schur complement.

use blockkrylov::dense::rng::{gaussian_vector, seeded_rng};
use blockkrylov::problems::spd_block;
use blockkrylov::theory::check_thm_cg;
use blockkrylov::{BlockVector, SchurBlock};

fn main() -> blockkrylov::Result<()> {
    let (sys, _) = spd_block(30, 20, 8)?;
    let mut rng = seeded_rng(1);
    let e = BlockVector::new(gaussian_vector(&mut rng, 30), gaussian_vector(&mut rng, 20));
    let degrees: Vec<usize> = (0..=10).collect();
    for block in [SchurBlock::S11, SchurBlock::S22] {
        let shat = sys.diag_block(block).clone();
        let rep = check_thm_cg(&sys, &shat, &e, block, &degrees)?;
        println!("{}", rep.summary());
    }
    Ok(())
}
