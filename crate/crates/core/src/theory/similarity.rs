//! Polynomial identities relating triangular, LDU and Schur-complement operators.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::block::{BlockSystem2x2, SchurBlock};
use crate::dense::{two_norm, LuFactors, Matrix};
use crate::error::{Error, Result};
use crate::krylov::{PolynomialCoeffs, Side};
use crate::precond::{build, preconditioned_matrix, Family, PreconditionerSpec};

use super::closed_form::{fp_schur_operator, preconditioned_schur, FpOperator};

/// The four triangular/LDU pairs related by a block-diagonal similarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimilarityVariant {
    /// `p(U11⁻¹A) blkdiag(E11, I) = blkdiag(E11, I) p(M11⁻¹A)`
    U11M11Left,
    /// `p(L22⁻¹A) blkdiag(I, E22) = blkdiag(I, E22) p(M22⁻¹A)`
    L22M22Left,
    /// `blkdiag(R11, I) p(AL11⁻¹) = p(AM11⁻¹) blkdiag(R11, I)`
    AL11M11Right,
    /// `blkdiag(I, R22) p(AU22⁻¹) = p(AM22⁻¹) blkdiag(I, R22)`
    AU22M22Right,
}

impl SimilarityVariant {
    pub const ALL: [SimilarityVariant; 4] = [
        SimilarityVariant::U11M11Left,
        SimilarityVariant::L22M22Left,
        SimilarityVariant::AL11M11Right,
        SimilarityVariant::AU22M22Right,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SimilarityVariant::U11M11Left => "U11_M11_left",
            SimilarityVariant::L22M22Left => "L22_M22_left",
            SimilarityVariant::AL11M11Right => "AL11_M11_right",
            SimilarityVariant::AU22M22Right => "AU22_M22_right",
        }
    }

    fn parts(self) -> (Family, SchurBlock, Side) {
        match self {
            SimilarityVariant::U11M11Left => (Family::UpperTriangular, SchurBlock::S11, Side::Left),
            SimilarityVariant::L22M22Left => (Family::LowerTriangular, SchurBlock::S22, Side::Left),
            SimilarityVariant::AL11M11Right => (Family::LowerTriangular, SchurBlock::S11, Side::Right),
            SimilarityVariant::AU22M22Right => (Family::UpperTriangular, SchurBlock::S22, Side::Right),
        }
    }

    pub fn schur_block(self) -> SchurBlock {
        self.parts().1
    }

    /// The Schur fixed-point operator in the similarity transform.
    pub fn fixed_point_operator(self) -> FpOperator {
        let (_, block, side) = self.parts();
        FpOperator::of(block, side)
    }
}

impl fmt::Display for SimilarityVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SimilarityVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SimilarityVariant::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown similarity variant '{s}'")))
    }
}

/// `‖lhs − rhs‖₂ / ‖rhs‖₂`, or the absolute defect when `rhs = 0`.
pub fn relative_defect(lhs: &Matrix, rhs: &Matrix) -> f64 {
    let diff = two_norm(&(lhs - rhs));
    let scale = two_norm(rhs);
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

fn operator(sys: &BlockSystem2x2, family: Family, block: SchurBlock, side: Side, shat: &Matrix) -> Result<Matrix> {
    let spec = PreconditionerSpec::with_user(family, block, shat.clone());
    let p = build(sys, &spec)?;
    Ok(preconditioned_matrix(sys, &p, side))
}

/// `blkdiag(X, I)` or `blkdiag(I, X)` with `X` on the given block.
fn embed(sys: &BlockSystem2x2, block: SchurBlock, x: &Matrix) -> Result<Matrix> {
    let (n1, n2) = (sys.n1(), sys.n2());
    let z12 = Matrix::zeros(n1, n2);
    let z21 = Matrix::zeros(n2, n1);
    match block {
        SchurBlock::S11 => Matrix::block2x2(x, &z12, &z21, &Matrix::identity(n2)),
        SchurBlock::S22 => Matrix::block2x2(&Matrix::identity(n1), &z12, &z21, x),
    }
}

fn require_consistent(coeffs: &PolynomialCoeffs) -> Result<()> {
    if coeffs.is_consistent() {
        Ok(())
    } else {
        Err(Error::Precondition("polynomial must satisfy p(0) = 1".into()))
    }
}

/// Relative defect of the similarity between a triangular and an LDU
/// preconditioned operator under a consistent polynomial.
pub fn check_prop22_similarity(
    sys: &BlockSystem2x2,
    shat: &Matrix,
    coeffs: &PolynomialCoeffs,
    variant: SimilarityVariant,
) -> Result<f64> {
    require_consistent(coeffs)?;
    let (family, block, side) = variant.parts();
    let tri = coeffs.eval_matrix(&operator(sys, family, block, side, shat)?);
    let ldu = coeffs.eval_matrix(&operator(sys, Family::BlockLdu, block, side, shat)?);
    let d = embed(sys, block, &fp_schur_operator(sys, variant.fixed_point_operator(), shat)?)?;
    let (lhs, rhs) = match side {
        Side::Left => (&tri * &d, &d * &ldu),
        Side::Right => (&d * &tri, &ldu * &d),
    };
    Ok(relative_defect(&lhs, &rhs))
}

/// Which change-of-basis matrix to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QForm {
    /// `Q = [I, A11⁻¹A12 E22⁻¹; 0, E22⁻¹]`, obtained by composing the
    /// triangular/LDU similarity with the LDU three-term factorization.
    Derived,
    /// `Q = [I, A11⁻¹A12 E22; 0, E22]`, the inverse of the diagonal factor
    /// replaced by the factor itself. Kept to report how far it is off.
    Literal,
}

/// Relative defect of `Q p(L22⁻¹A) = p(blkdiag(I, Ŝ22⁻¹S22)) Q`, with `Q`
/// the [`QForm::Derived`] change of basis.
pub fn check_qq_change_of_basis(sys: &BlockSystem2x2, shat: &Matrix, coeffs: &PolynomialCoeffs) -> Result<f64> {
    q_defect(sys, shat, coeffs, QForm::Derived)
}

pub fn q_defect(sys: &BlockSystem2x2, shat: &Matrix, coeffs: &PolynomialCoeffs, form: QForm) -> Result<f64> {
    require_consistent(coeffs)?;
    let e22 = fp_schur_operator(sys, FpOperator::E22, shat)?;
    let lu = LuFactors::new(&e22).map_err(|_| {
        Error::Precondition("I − Ŝ22⁻¹S22 is singular, so Q is not a change of basis".into())
    })?;
    let factor = match form {
        QForm::Derived => lu.inverse(),
        QForm::Literal => e22,
    };
    let n1 = sys.n1();
    let q = Matrix::block2x2(
        &Matrix::identity(n1),
        &(&sys.a11_inv_a12()? * &factor),
        &Matrix::zeros(sys.n2(), n1),
        &factor,
    )?;
    let l22 = operator(sys, Family::LowerTriangular, SchurBlock::S22, Side::Left, shat)?;
    let t = preconditioned_schur(sys, SchurBlock::S22, Side::Left, shat)?;
    let diag = embed(sys, SchurBlock::S22, &t)?;
    let lhs = &q * &coeffs.eval_matrix(&l22);
    let rhs = &coeffs.eval_matrix(&diag) * &q;
    Ok(relative_defect(&lhs, &rhs))
}

/// Largest relative defect of the two commutation identities
/// `A11⁻¹A12 q(I − A22⁻¹S22) = q(I − A11⁻¹S11) A11⁻¹A12` and
/// `A22⁻¹A21 q(I − A11⁻¹S11) = q(I − A22⁻¹S22) A22⁻¹A21`.
pub fn check_commutation(sys: &BlockSystem2x2, coeffs: &PolynomialCoeffs) -> Result<f64> {
    let b12 = sys.a11_inv_a12()?;
    let b21 = sys.a22_inv_a21()?;
    let k11 = &b12 * &b21;
    let k22 = &b21 * &b12;
    let q11 = coeffs.eval_matrix(&k11);
    let q22 = coeffs.eval_matrix(&k22);
    let first = relative_defect(&(&b12 * &q22), &(&q11 * &b12));
    let second = relative_defect(&(&b21 * &q11), &(&q22 * &b21));
    Ok(first.max(second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::rng::{gaussian_matrix, seeded_rng};

    fn scalar_system() -> BlockSystem2x2 {
        let m = |v: f64| Matrix::from_rows(&[&[v]]);
        BlockSystem2x2::new(m(2.0), m(1.0), m(1.0), m(2.0)).unwrap()
    }

    fn random_system(seed: u64, n1: usize, n2: usize) -> (BlockSystem2x2, crate::dense::rng::Rng) {
        let mut rng = seeded_rng(seed);
        let shift = |m: Matrix, s: f64| &m + &Matrix::identity(m.rows()).scale(s);
        let sys = BlockSystem2x2::new(
            shift(gaussian_matrix(&mut rng, n1, n1).scale(0.3), 2.5),
            gaussian_matrix(&mut rng, n1, n2).scale(0.5),
            gaussian_matrix(&mut rng, n2, n1).scale(0.5),
            shift(gaussian_matrix(&mut rng, n2, n2).scale(0.3), 2.5),
        )
        .unwrap();
        (sys, rng)
    }

    #[test]
    fn constant_polynomial_has_no_defect() {
        let (sys, _) = random_system(1, 5, 3);
        let one = PolynomialCoeffs::consistent(vec![1.0]).unwrap();
        for v in SimilarityVariant::ALL {
            let shat = sys.diag_block(v.schur_block()).clone();
            assert!(check_prop22_similarity(&sys, &shat, &one, v).unwrap() < 1e-14);
        }
        assert!(check_qq_change_of_basis(&sys, sys.a22(), &one).unwrap() < 1e-14);
    }

    #[test]
    fn scalar_blocks_with_linear_polynomial() {
        let sys = scalar_system();
        let p = PolynomialCoeffs::consistent(vec![1.0, -1.0]).unwrap();
        let shat = Matrix::from_rows(&[&[1.0]]);
        let defect = check_prop22_similarity(&sys, &shat, &p, SimilarityVariant::U11M11Left).unwrap();
        assert!(defect <= 1e-12, "{defect:e}");
    }

    #[test]
    fn random_polynomials_on_random_systems() {
        let (sys, mut rng) = random_system(2, 8, 5);
        let p = PolynomialCoeffs::random_consistent(&mut rng, 6);
        for v in SimilarityVariant::ALL {
            let shat = sys.diag_block(v.schur_block()).clone();
            let defect = check_prop22_similarity(&sys, &shat, &p, v).unwrap();
            assert!(defect <= 1e-9, "{v}: {defect:e}");
        }
        let q = PolynomialCoeffs::random_consistent(&mut rng, 5);
        assert!(check_qq_change_of_basis(&sys, sys.a22(), &q).unwrap() <= 1e-9);
        assert!(check_commutation(&sys, &q).unwrap() <= 1e-9);
    }

    #[test]
    fn literal_q_misses_for_linear_polynomials() {
        let (sys, _) = random_system(5, 5, 4);
        let p = PolynomialCoeffs::consistent(vec![1.0, -1.0]).unwrap();
        assert!(q_defect(&sys, sys.a22(), &p, QForm::Literal).unwrap() > 1e-3);
        assert!(q_defect(&sys, sys.a22(), &p, QForm::Derived).unwrap() < 1e-12);
    }

    #[test]
    fn singular_fixed_point_operator_is_refused() {
        let (sys, _) = random_system(3, 4, 3);
        let s = sys.schur_complement(SchurBlock::S22).unwrap();
        let p = PolynomialCoeffs::consistent(vec![1.0, 0.5]).unwrap();
        assert!(matches!(
            check_qq_change_of_basis(&sys, &s, &p),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn inconsistent_polynomial_is_refused() {
        let (sys, _) = random_system(4, 3, 3);
        let p = PolynomialCoeffs::new(vec![2.0, 1.0]);
        assert!(check_prop22_similarity(&sys, sys.a11(), &p, SimilarityVariant::U11M11Left).is_err());
    }
}
