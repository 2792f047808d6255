//! Unrestarted GMRES on I ⊕ tridiag(−1, c, −1) for c = 2 and c = 2.0025.
//! The two spectra differ only slightly, yet the residual curves separate by
//! five orders of magnitude by iteration 250.

use blockkrylov::problems::example11_curves;

fn main() -> blockkrylov::Result<()> {
    let (a1, a2) = example11_curves()?;
    let (r1, r2) = (a1.relative(), a2.relative());
    println!("{:>5} {:>12} {:>12}", "iter", "c = 2", "c = 2.0025");
    for k in (0..=500).step_by(50) {
        println!("{k:>5} {:>12.3e} {:>12.3e}", r1[k.min(r1.len() - 1)], r2[k.min(r2.len() - 1)]);
    }
    println!("first below 1e-12: {:?} / {:?}", a1.first_below(1e-12), a2.first_below(1e-12));
    Ok(())
}
