//! GMRES makes no progress on I − N for a nilpotent N in a suitable basis
//! until the last possible step.

use blockkrylov::krylov::{gmres, KrylovConfig, Side};
use blockkrylov::problems::{nilpotent, NilpotentBasis};

fn main() -> blockkrylov::Result<()> {
    for (n, bw) in [(50, 1), (100, 1), (100, 4)] {
        let (a, b) = nilpotent(n, bw, NilpotentBasis::Stagnating)?;
        let (_, h) = gmres(&a, None, &b, &vec![0.0; n], &KrylovConfig::gmres(Side::Right, 1e-12, n + 1))?;
        let rel = h.relative();
        let stall = rel.iter().take_while(|r| (*r - 1.0).abs() < 1e-12).count();
        println!("n = {n:>3}, bandwidth {bw}: residual stays at 1 for {stall} iterations, converged at {}", h.iterations);
    }
    Ok(())
}
