//! Fixed-point propagation operators and their closed-form powers.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::block::{BlockSystem2x2, SchurBlock};
use crate::dense::{LuFactors, Matrix};
use crate::error::{Error, Result};
use crate::krylov::Side;
use crate::precond::{error_propagator, residual_propagator, Family, PreconditionerSpec};

/// Schur-complement fixed-point operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FpOperator {
    /// `I − Ŝ11⁻¹S11`
    E11,
    /// `I − S11Ŝ11⁻¹`
    R11,
    /// `I − Ŝ22⁻¹S22`
    E22,
    /// `I − S22Ŝ22⁻¹`
    R22,
}

impl FpOperator {
    pub fn block(self) -> SchurBlock {
        match self {
            FpOperator::E11 | FpOperator::R11 => SchurBlock::S11,
            FpOperator::E22 | FpOperator::R22 => SchurBlock::S22,
        }
    }

    /// Error (left) or residual (right) form on a block.
    pub fn of(block: SchurBlock, side: Side) -> Self {
        match (block, side) {
            (SchurBlock::S11, Side::Left) => FpOperator::E11,
            (SchurBlock::S11, Side::Right) => FpOperator::R11,
            (SchurBlock::S22, Side::Left) => FpOperator::E22,
            (SchurBlock::S22, Side::Right) => FpOperator::R22,
        }
    }

    pub fn side(self) -> Side {
        match self {
            FpOperator::E11 | FpOperator::E22 => Side::Left,
            FpOperator::R11 | FpOperator::R22 => Side::Right,
        }
    }
}

/// `Ŝ⁻¹S` (left) or `SŜ⁻¹` (right) for the block of `which`.
pub fn preconditioned_schur(sys: &BlockSystem2x2, block: SchurBlock, side: Side, shat: &Matrix) -> Result<Matrix> {
    let s = sys.schur_complement(block)?;
    check_shat(sys, block, shat)?;
    let lu = LuFactors::new(shat)?;
    Ok(match side {
        Side::Left => lu.solve_matrix(&s),
        Side::Right => lu.right_solve_matrix(&s),
    })
}

pub fn fp_schur_operator(sys: &BlockSystem2x2, which: FpOperator, shat: &Matrix) -> Result<Matrix> {
    let t = preconditioned_schur(sys, which.block(), which.side(), shat)?;
    Ok(&Matrix::identity(t.rows()) - &t)
}

fn check_shat(sys: &BlockSystem2x2, block: SchurBlock, shat: &Matrix) -> Result<()> {
    let n = sys.block_dim(block);
    if shat.rows() != n || shat.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "Schur approximation for block {block} must be {n}x{n}, got {}x{}",
            shat.rows(),
            shat.cols()
        )));
    }
    Ok(())
}

/// The propagation powers with a known block closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedFormSelector {
    /// `(I − L11⁻¹A)^d`
    L11Left,
    /// `(I − AL22⁻¹)^d`
    L22Right,
    /// `(I − AU11⁻¹)^d`
    U11Right,
    /// `(I − U22⁻¹A)^d`
    U22Left,
    /// `(I − AL11⁻¹)^d`, nonzero only in the first block row
    L11Right,
    /// `(I − L22⁻¹A)^d`
    L22Left,
    /// `(I − AU22⁻¹)^d`
    U22Right,
    /// `(I − U11⁻¹A)^d`
    U11Left,
    M11Left,
    M11Right,
    M22Left,
    M22Right,
    /// `(I − D⁻¹A)^{2d}` with `D = blkdiag(A11, A22)`
    JacobiEvenLeft,
    /// `(I − AD⁻¹)^{2d}`
    JacobiEvenRight,
}

impl ClosedFormSelector {
    pub const ALL: [ClosedFormSelector; 14] = [
        ClosedFormSelector::L11Left,
        ClosedFormSelector::L22Right,
        ClosedFormSelector::U11Right,
        ClosedFormSelector::U22Left,
        ClosedFormSelector::L11Right,
        ClosedFormSelector::L22Left,
        ClosedFormSelector::U22Right,
        ClosedFormSelector::U11Left,
        ClosedFormSelector::M11Left,
        ClosedFormSelector::M11Right,
        ClosedFormSelector::M22Left,
        ClosedFormSelector::M22Right,
        ClosedFormSelector::JacobiEvenLeft,
        ClosedFormSelector::JacobiEvenRight,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClosedFormSelector::L11Left => "L11_left",
            ClosedFormSelector::L22Right => "L22_right",
            ClosedFormSelector::U11Right => "U11_right",
            ClosedFormSelector::U22Left => "U22_left",
            ClosedFormSelector::L11Right => "AL11_right_lowrank",
            ClosedFormSelector::L22Left => "L22_left",
            ClosedFormSelector::U22Right => "AU22_right",
            ClosedFormSelector::U11Left => "U11_left",
            ClosedFormSelector::M11Left => "M11_left",
            ClosedFormSelector::M11Right => "M11_right",
            ClosedFormSelector::M22Left => "M22_left",
            ClosedFormSelector::M22Right => "M22_right",
            ClosedFormSelector::JacobiEvenLeft => "Jacobi_even_left",
            ClosedFormSelector::JacobiEvenRight => "Jacobi_even_right",
        }
    }

    pub fn family(self) -> Family {
        use ClosedFormSelector::*;
        match self {
            L11Left | L22Right | L11Right | L22Left => Family::LowerTriangular,
            U11Right | U22Left | U22Right | U11Left => Family::UpperTriangular,
            M11Left | M11Right | M22Left | M22Right => Family::BlockLdu,
            JacobiEvenLeft | JacobiEvenRight => Family::BlockDiagonal,
        }
    }

    pub fn schur_block(self) -> SchurBlock {
        use ClosedFormSelector::*;
        match self {
            L11Left | U11Right | L11Right | U11Left | M11Left | M11Right => SchurBlock::S11,
            _ => SchurBlock::S22,
        }
    }

    pub fn side(self) -> Side {
        use ClosedFormSelector::*;
        match self {
            L11Left | U22Left | L22Left | U11Left | M11Left | M22Left | JacobiEvenLeft => Side::Left,
            _ => Side::Right,
        }
    }

    /// Whether the Schur approximation enters the formula (block Jacobi fixes `Ŝ = A_kk`).
    pub fn uses_shat(self) -> bool {
        self.family() != Family::BlockDiagonal
    }

    /// Power of the propagator that the closed form of degree `d` represents.
    pub fn exponent(self, degree: usize) -> usize {
        if self.family() == Family::BlockDiagonal {
            2 * degree
        } else {
            degree
        }
    }
}

impl fmt::Display for ClosedFormSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClosedFormSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        let key = match key.as_str() {
            "l11_right" => "al11_right_lowrank".to_string(),
            "u22_right" => "au22_right".to_string(),
            _ => key,
        };
        ClosedFormSelector::ALL
            .into_iter()
            .find(|sel| sel.name().to_ascii_lowercase() == key)
            .ok_or_else(|| Error::Parse(format!("unknown closed-form selector '{s}'")))
    }
}

fn check_degree(degree: usize) -> Result<()> {
    if degree == 0 {
        Err(Error::InvalidConfig("closed forms are stated for d >= 1".into()))
    } else {
        Ok(())
    }
}

fn stack_rows(top: &Matrix, bottom: &Matrix) -> Matrix {
    Matrix::vstack(top, bottom)
}

/// The block closed form of the selected propagation power, assembled from
/// its factors rather than by repeated multiplication of the propagator.
pub fn closed_form_power(
    sys: &BlockSystem2x2,
    sel: ClosedFormSelector,
    degree: usize,
    shat: &Matrix,
) -> Result<Matrix> {
    use ClosedFormSelector::*;
    check_degree(degree)?;
    let (n1, n2) = (sys.n1(), sys.n2());
    let i1 = Matrix::identity(n1);
    let i2 = Matrix::identity(n2);
    let z11 = Matrix::zeros(n1, n1);
    let z12 = Matrix::zeros(n1, n2);
    let z21 = Matrix::zeros(n2, n1);
    let z22 = Matrix::zeros(n2, n2);
    let d = degree;

    if sel.uses_shat() {
        check_shat(sys, sel.schur_block(), shat)?;
    }
    let fp = |which: FpOperator, power: usize| -> Result<Matrix> {
        Ok(fp_schur_operator(sys, which, shat)?.pow(power))
    };
    let shat_lu = || LuFactors::new(shat);

    Ok(match sel {
        L11Left => {
            let lu = shat_lu()?;
            let col = stack_rows(&i1, &sys.a22_inv_a21()?.scale(-1.0));
            let row = Matrix::hstack(&(&i1 - &lu.solve_matrix(sys.a11())), &lu.solve_matrix(sys.a12()).scale(-1.0));
            &(&col * &fp(FpOperator::E11, d - 1)?) * &row
        }
        L22Right => {
            let lu = shat_lu()?;
            let col = stack_rows(
                &lu.right_solve_matrix(sys.a12()).scale(-1.0),
                &(&i2 - &lu.right_solve_matrix(sys.a22())),
            );
            let row = Matrix::hstack(&sys.a21_a11_inv()?.scale(-1.0), &i2);
            &(&col * &fp(FpOperator::R22, d - 1)?) * &row
        }
        U11Right => {
            let lu = shat_lu()?;
            let col = stack_rows(
                &(&i1 - &lu.right_solve_matrix(sys.a11())),
                &lu.right_solve_matrix(sys.a21()).scale(-1.0),
            );
            let row = Matrix::hstack(&i1, &sys.a12_a22_inv()?.scale(-1.0));
            &(&col * &fp(FpOperator::R11, d - 1)?) * &row
        }
        U22Left => {
            let lu = shat_lu()?;
            let col = stack_rows(&sys.a11_inv_a12()?.scale(-1.0), &i2);
            let row = Matrix::hstack(&lu.solve_matrix(sys.a21()).scale(-1.0), &(&i2 - &lu.solve_matrix(sys.a22())));
            &(&col * &fp(FpOperator::E22, d - 1)?) * &row
        }
        L11Right => {
            let r = fp(FpOperator::R11, d - 1)?;
            let r11 = fp_schur_operator(sys, FpOperator::R11, shat)?;
            let top_right = (&r * &sys.a12_a22_inv()?).scale(-1.0);
            Matrix::block2x2(&(&r * &r11), &top_right, &z21, &z22)?
        }
        L22Left => {
            let e = fp(FpOperator::E22, d - 1)?;
            let e22 = fp_schur_operator(sys, FpOperator::E22, shat)?;
            let top_right = (&sys.a11_inv_a12()? * &e).scale(-1.0);
            Matrix::block2x2(&z11, &top_right, &z21, &(&e * &e22))?
        }
        U22Right => {
            let r = fp(FpOperator::R22, d - 1)?;
            let r22 = fp_schur_operator(sys, FpOperator::R22, shat)?;
            let bottom_left = (&r * &sys.a21_a11_inv()?).scale(-1.0);
            Matrix::block2x2(&z11, &z12, &bottom_left, &(&r * &r22))?
        }
        U11Left => {
            let e = fp(FpOperator::E11, d - 1)?;
            let e11 = fp_schur_operator(sys, FpOperator::E11, shat)?;
            let bottom_left = (&sys.a22_inv_a21()? * &e).scale(-1.0);
            Matrix::block2x2(&(&e * &e11), &z12, &bottom_left, &z22)?
        }
        M11Left => {
            let e = fp(FpOperator::E11, d)?;
            let bottom_left = (&sys.a22_inv_a21()? * &e).scale(-1.0);
            Matrix::block2x2(&e, &z12, &bottom_left, &z22)?
        }
        M11Right => {
            let r = fp(FpOperator::R11, d)?;
            let top_right = (&r * &sys.a12_a22_inv()?).scale(-1.0);
            Matrix::block2x2(&r, &top_right, &z21, &z22)?
        }
        M22Left => {
            let e = fp(FpOperator::E22, d)?;
            let top_right = (&sys.a11_inv_a12()? * &e).scale(-1.0);
            Matrix::block2x2(&z11, &top_right, &z21, &e)?
        }
        M22Right => {
            let r = fp(FpOperator::R22, d)?;
            let bottom_left = (&r * &sys.a21_a11_inv()?).scale(-1.0);
            Matrix::block2x2(&z11, &z12, &bottom_left, &r)?
        }
        JacobiEvenLeft => {
            let b1 = &sys.a11_inv_a12()? * &sys.a22_inv_a21()?;
            let b2 = &sys.a22_inv_a21()? * &sys.a11_inv_a12()?;
            Matrix::block2x2(&b1.pow(d), &z12, &z21, &b2.pow(d))?
        }
        JacobiEvenRight => {
            let b1 = &sys.a12_a22_inv()? * &sys.a21_a11_inv()?;
            let b2 = &sys.a21_a11_inv()? * &sys.a12_a22_inv()?;
            Matrix::block2x2(&b1.pow(d), &z12, &z21, &b2.pow(d))?
        }
    })
}

/// The preconditioner behind a selector, with `shat` as its Schur approximation.
pub fn selector_spec(sel: ClosedFormSelector, shat: &Matrix) -> PreconditionerSpec {
    if sel.uses_shat() {
        PreconditionerSpec::with_user(sel.family(), sel.schur_block(), shat.clone())
    } else {
        PreconditionerSpec::block_jacobi()
    }
}

/// The same power computed by multiplying out the assembled propagator.
pub fn direct_power(sys: &BlockSystem2x2, sel: ClosedFormSelector, degree: usize, shat: &Matrix) -> Result<Matrix> {
    check_degree(degree)?;
    if sel.uses_shat() {
        check_shat(sys, sel.schur_block(), shat)?;
    }
    let spec = selector_spec(sel, shat);
    let propagator = match sel.side() {
        Side::Left => error_propagator(sys, &spec)?,
        Side::Right => residual_propagator(sys, &spec)?,
    };
    Ok(propagator.pow(sel.exponent(degree)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::rng::{gaussian_matrix, seeded_rng};
    use crate::dense::two_norm;

    fn random_system(seed: u64, n1: usize, n2: usize) -> BlockSystem2x2 {
        let mut rng = seeded_rng(seed);
        let shift = |m: Matrix, s: f64| &m + &Matrix::identity(m.rows()).scale(s);
        BlockSystem2x2::new(
            shift(gaussian_matrix(&mut rng, n1, n1).scale(0.3), 3.0),
            gaussian_matrix(&mut rng, n1, n2).scale(0.5),
            gaussian_matrix(&mut rng, n2, n1).scale(0.5),
            shift(gaussian_matrix(&mut rng, n2, n2).scale(0.3), 3.0),
        )
        .unwrap()
    }

    fn shat_for(sys: &BlockSystem2x2, block: SchurBlock) -> Matrix {
        sys.diag_block(block).clone()
    }

    #[test]
    fn exact_shat_zeroes_the_fixed_point_operator() {
        let sys = random_system(1, 5, 4);
        let s = sys.schur_complement(SchurBlock::S22).unwrap();
        let e = fp_schur_operator(&sys, FpOperator::E22, &s).unwrap();
        assert!(e.max_abs() < 1e-12);
    }

    #[test]
    fn identity_shat_gives_i_minus_s() {
        let sys = random_system(2, 5, 4);
        let s = sys.schur_complement(SchurBlock::S11).unwrap();
        let e = fp_schur_operator(&sys, FpOperator::R11, &Matrix::identity(5)).unwrap();
        assert!((&e - &(&Matrix::identity(5) - &s)).max_abs() < 1e-12);
    }

    #[test]
    fn wrong_size_shat_is_rejected() {
        let sys = random_system(3, 5, 4);
        assert!(fp_schur_operator(&sys, FpOperator::E11, &Matrix::identity(4)).is_err());
    }

    #[test]
    fn every_selector_matches_its_direct_power() {
        let sys = random_system(4, 6, 4);
        for sel in ClosedFormSelector::ALL {
            let shat = shat_for(&sys, sel.schur_block());
            for d in 1..=3 {
                let closed = closed_form_power(&sys, sel, d, &shat).unwrap();
                let direct = direct_power(&sys, sel, d, &shat).unwrap();
                let rel = two_norm(&(&closed - &direct)) / two_norm(&direct).max(1e-300);
                assert!(rel < 1e-9, "{sel} d={d}: {rel:e}");
            }
        }
    }

    #[test]
    fn exact_schur_kills_triangular_powers_at_two() {
        let sys = random_system(5, 4, 4);
        for sel in ClosedFormSelector::ALL.into_iter().filter(|s| s.uses_shat()) {
            let s = sys.schur_complement(sel.schur_block()).unwrap();
            let m = closed_form_power(&sys, sel, 2, &s).unwrap();
            assert!(m.max_abs() < 1e-10, "{sel}");
        }
    }

    #[test]
    fn selector_names_round_trip() {
        for sel in ClosedFormSelector::ALL {
            assert_eq!(sel.name().parse::<ClosedFormSelector>().unwrap(), sel);
        }
        assert!("nope".parse::<ClosedFormSelector>().is_err());
        assert!(closed_form_power(&random_system(6, 3, 3), ClosedFormSelector::M11Left, 0, &Matrix::identity(3)).is_err());
    }
}
