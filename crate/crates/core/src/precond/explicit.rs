//! Dense forms of preconditioners and their propagation operators.

use crate::block::{BlockSystem2x2, SchurBlock};
use crate::dense::{LuFactors, Matrix};
use crate::error::{Error, Result};
use crate::krylov::{Preconditioner, Side};

use super::build::{build, schur_approximation};
use super::spec::{Family, PreconditionerSpec};

/// `P⁻¹` assembled column by column from `apply`.
pub fn explicit_inverse(p: &dyn Preconditioner) -> Matrix {
    let n = p.dim();
    let mut m = Matrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        m.set_column(j, &p.apply(&e));
        e[j] = 0.0;
    }
    m
}

fn require_direct(spec: &PreconditionerSpec) -> Result<()> {
    if spec.is_direct() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "{spec} uses inexact inner solves and has no fixed matrix form"
        )))
    }
}

/// The triangular factors `(L, U)` sharing the spec's Schur block.
fn triangular_pair(sys: &BlockSystem2x2, spec: &PreconditionerSpec, shat: &Matrix) -> (Matrix, Matrix) {
    let (d1, d2) = match spec.schur_block {
        SchurBlock::S11 => (shat.clone(), sys.a22().clone()),
        SchurBlock::S22 => (sys.a11().clone(), shat.clone()),
    };
    let z12 = Matrix::zeros(sys.n1(), sys.n2());
    let z21 = Matrix::zeros(sys.n2(), sys.n1());
    let l = Matrix::block2x2(&d1, &z12, sys.a21(), &d2).expect("conformal");
    let u = Matrix::block2x2(&d1, sys.a12(), &z21, &d2).expect("conformal");
    (l, u)
}

/// The preconditioner matrix `P` itself, built from the blocks rather than
/// from `apply`.
pub fn assembled_preconditioner(sys: &BlockSystem2x2, spec: &PreconditionerSpec) -> Result<Matrix> {
    require_direct(spec)?;
    let mut shat = schur_approximation(sys, spec)?;
    if spec.negate_schur {
        shat = shat.scale(-1.0);
    }
    let (l, u) = triangular_pair(sys, spec, &shat);
    let a = sys.assemble();
    Ok(match spec.family {
        Family::LowerTriangular => l,
        Family::UpperTriangular => u,
        Family::BlockDiagonal => {
            let (d1, d2) = match spec.schur_block {
                SchurBlock::S11 => (shat, sys.a22().clone()),
                SchurBlock::S22 => (sys.a11().clone(), shat),
            };
            Matrix::block2x2(
                &d1,
                &Matrix::zeros(sys.n1(), sys.n2()),
                &Matrix::zeros(sys.n2(), sys.n1()),
                &d2,
            )?
        }
        Family::BlockLdu => {
            let n1 = sys.n1();
            let n2 = sys.n2();
            let i1 = Matrix::identity(n1);
            let i2 = Matrix::identity(n2);
            let z12 = Matrix::zeros(n1, n2);
            let z21 = Matrix::zeros(n2, n1);
            match spec.schur_block {
                SchurBlock::S22 => {
                    let left = Matrix::block2x2(&i1, &z12, &sys.a21_a11_inv()?, &i2)?;
                    let mid = Matrix::block2x2(sys.a11(), &z12, &z21, &shat)?;
                    let right = Matrix::block2x2(&i1, &sys.a11_inv_a12()?, &z21, &i2)?;
                    &(&left * &mid) * &right
                }
                SchurBlock::S11 => {
                    let left = Matrix::block2x2(&i1, &sys.a12_a22_inv()?, &z21, &i2)?;
                    let mid = Matrix::block2x2(&shat, &z12, &z21, sys.a22())?;
                    let right = Matrix::block2x2(&i1, &z12, &sys.a22_inv_a21()?, &i2)?;
                    &(&left * &mid) * &right
                }
            }
        }
        // H⁻¹ = L⁻¹(L + U − A)U⁻¹ and G⁻¹ = U⁻¹(L + U − A)L⁻¹
        Family::SymTriUl | Family::SymTriLu => {
            let middle = &(&l + &u) - &a;
            let mid_inv = LuFactors::new(&middle).map_err(|_| {
                Error::Precondition("L + U − A is singular; the symmetric form has no finite inverse".into())
            })?;
            if spec.family == Family::SymTriUl {
                &u * &mid_inv.solve_matrix(&l)
            } else {
                &l * &mid_inv.solve_matrix(&u)
            }
        }
    })
}

/// `I − P⁻¹A`
pub fn error_propagator(sys: &BlockSystem2x2, spec: &PreconditionerSpec) -> Result<Matrix> {
    require_direct(spec)?;
    let p = build(sys, spec)?;
    let pa = preconditioned_matrix(sys, &p, Side::Left);
    Ok(&Matrix::identity(sys.dim()) - &pa)
}

/// `I − AP⁻¹`
pub fn residual_propagator(sys: &BlockSystem2x2, spec: &PreconditionerSpec) -> Result<Matrix> {
    require_direct(spec)?;
    let p = build(sys, spec)?;
    let ap = preconditioned_matrix(sys, &p, Side::Right);
    Ok(&Matrix::identity(sys.dim()) - &ap)
}

/// `P⁻¹A` (left) or `AP⁻¹` (right) as a dense matrix.
pub fn preconditioned_matrix(sys: &BlockSystem2x2, p: &dyn Preconditioner, side: Side) -> Matrix {
    let a = sys.assemble();
    match side {
        Side::Left => {
            let mut out = Matrix::zeros(a.rows(), a.cols());
            for j in 0..a.cols() {
                out.set_column(j, &p.apply(&a.column(j)));
            }
            out
        }
        Side::Right => &a * &explicit_inverse(p),
    }
}
