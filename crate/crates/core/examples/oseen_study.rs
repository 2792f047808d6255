//! Iteration counts of every preconditioner family on the finite-difference
//! Oseen system, with inexact momentum solves and with both signs of Ŝ.

use std::time::Instant;

use blockkrylov::block::SchurBlock;
use blockkrylov::precond::{Family, PreconditionerSpec, SchurApprox};
use blockkrylov::problems::{oseen_fd, oseen_report, rows_to_csv, OseenParams};

fn main() -> blockkrylov::Result<()> {
    let m = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(24);
    let params = OseenParams { m, ..OseenParams::default() };
    let (sys, b) = oseen_fd(&params)?;
    println!("n1 = {}, n2 = {}", sys.n1(), sys.n2());

    let specs: Vec<_> = Family::ALL
        .into_iter()
        .map(|f| PreconditionerSpec::new(f, SchurBlock::S22, SchurApprox::DiagonalSchur))
        .collect();
    let t = Instant::now();
    let rows = oseen_report(&sys, &b, &specs, &[Some(1e-8)], &[1e-8], 500)?;
    print!("{}", rows_to_csv(&rows));
    println!("inexact sweep: {:.1?}", t.elapsed());

    let signed: Vec<_> = [Family::BlockDiagonal, Family::LowerTriangular]
        .into_iter()
        .flat_map(|f| {
            let s = PreconditionerSpec::new(f, SchurBlock::S22, SchurApprox::DiagonalSchur);
            [s.clone(), s.negated()]
        })
        .collect();
    let t = Instant::now();
    let rows = oseen_report(&sys, &b, &signed, &[None], &[1e-8], 500)?;
    print!("{}", rows_to_csv(&rows));
    println!("sign study: {:.1?}", t.elapsed());
    Ok(())
}
