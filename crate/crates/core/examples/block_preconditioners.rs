//! Every preconditioner family on one random 2×2 block system, with the
//! exact Schur complement and with a diagonal approximation of it.

use blockkrylov::krylov::{gmres, KrylovConfig, Side};
use blockkrylov::precond::{build, Family, PreconditionerSpec, SchurApprox};
use blockkrylov::problems::random_block;
use blockkrylov::SchurBlock;

fn main() -> blockkrylov::Result<()> {
    let (sys, b) = random_block(40, 25, 3, 100.0)?;
    let x0 = vec![0.0; b.len()];
    let (_, plain) = gmres(&sys, None, &b, &x0, &KrylovConfig::gmres(Side::Right, 1e-10, 200))?;
    println!("no preconditioner: {} iterations", plain.iterations);
    for approx in [SchurApprox::ExactSchur, SchurApprox::DiagonalSchur] {
        for family in Family::ALL {
            for side in [Side::Left, Side::Right] {
                let spec = PreconditionerSpec::new(family, SchurBlock::S22, approx.clone());
                let p = build(&sys, &spec)?;
                let (_, h) = gmres(&sys, Some(&p), &b, &x0, &KrylovConfig::gmres(side, 1e-10, 200))?;
                println!("{:<28} {side:?}: {:>3} iterations", spec.to_string(), h.iterations);
            }
        }
    }
    // the same thing from a CLI-style string
    let spec = PreconditionerSpec::parse("LDU:11:user-diag:inner=1e-6:neg")?;
    println!("parsed {spec}");
    Ok(())
}
