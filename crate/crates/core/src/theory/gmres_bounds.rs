//! Per-residual GMRES bounds for block-LDU and block-triangular preconditioning.
//!
//! Every quantity is a minimal residual vector of an explicit operator, so
//! both sides of each inequality are computed exactly up to rounding.

use crate::block::{BlockSystem2x2, BlockVector, SchurBlock};
use crate::dense::{concat, norm2, sub, Matrix, Vector};
use crate::error::{Error, Result};
use crate::krylov::{minimal_residuals, MinimalResiduals, Side};
use crate::precond::{build, preconditioned_matrix, Family, PreconditionerSpec};

use super::closed_form::preconditioned_schur;
use super::report::{BoundReport, Provenance, Slack};

/// The preconditioned 2x2 operator for `family` on `side`, with `shat` on `block`.
pub fn preconditioned_operator(
    sys: &BlockSystem2x2,
    shat: &Matrix,
    family: Family,
    side: Side,
    block: SchurBlock,
) -> Result<Matrix> {
    let spec = PreconditionerSpec::with_user(family, block, shat.clone());
    let p = build(sys, &spec)?;
    Ok(preconditioned_matrix(sys, &p, side))
}

fn check_residual(sys: &BlockSystem2x2, r: &BlockVector) -> Result<()> {
    if r.part1.len() != sys.n1() || r.part2.len() != sys.n2() {
        return Err(Error::DimensionMismatch(format!(
            "residual blocks {}+{} do not match system {}+{}",
            r.part1.len(),
            r.part2.len(),
            sys.n1(),
            sys.n2()
        )));
    }
    Ok(())
}

fn max_degree(degrees: &[usize]) -> usize {
    degrees.iter().copied().max().unwrap_or(0)
}

/// `T w` for a dense `T`.
fn apply(t: &Matrix, w: &[f64]) -> Vector {
    t.mul_vec(w)
}

/// `(I − T) w`
fn fixed_point_step(t: &Matrix, w: &[f64]) -> Vector {
    sub(w, &apply(t, w))
}

struct Chain {
    middle: MinimalResiduals,
    schur: MinimalResiduals,
}

fn provenance(family: Family, side: Side, block: SchurBlock) -> Provenance {
    Provenance {
        spec: Some(format!("{}:{}:user", family.token(), block.label())),
        side: Some(side),
        schur_block: Some(block),
        ..Provenance::default()
    }
}

fn run_chain(op: &Matrix, r: &[f64], t: &Matrix, schur_start: &[f64], dmax: usize) -> Result<Chain> {
    Ok(Chain {
        middle: minimal_residuals(op, r, dmax)?,
        schur: minimal_residuals(t, schur_start, dmax)?,
    })
}

/// Block-LDU preconditioning: lower bound from the Schur minimal residual of
/// degree `d` (scaled by 1/√2 on the right), upper bound from one fixed-point
/// step applied to the Schur minimal residual of degree `d − 1`.
pub fn check_thm_ldu_gmres(
    sys: &BlockSystem2x2,
    shat: &Matrix,
    r: &BlockVector,
    side: Side,
    block: SchurBlock,
    degrees: &[usize],
) -> Result<BoundReport> {
    check_residual(sys, r)?;
    let op = preconditioned_operator(sys, shat, Family::BlockLdu, side, block)?;
    let t = preconditioned_schur(sys, block, side, shat)?;
    let start = match (side, block) {
        (Side::Left, _) => r.part(block).clone(),
        (Side::Right, SchurBlock::S22) => sub(&r.part2, &sys.a21_a11_inv()?.mul_vec(&r.part1)),
        (Side::Right, SchurBlock::S11) => sub(&r.part1, &sys.a12_a22_inv()?.mul_vec(&r.part2)),
    };
    let chain = run_chain(&op, &r.joined(), &t, &start, max_degree(degrees))?;
    let coupling = match block {
        SchurBlock::S22 => sys.a11_inv_a12()?,
        SchurBlock::S11 => sys.a22_inv_a21()?,
    };
    let factor = match side {
        Side::Left => 1.0,
        Side::Right => std::f64::consts::FRAC_1_SQRT_2,
    };
    let full = r.joined();
    let mut report = BoundReport::new(
        format!("block-LDU GMRES ({side:?}, {block})"),
        Slack::exact(),
        norm2(&full),
    )
    .with_provenance(provenance(Family::BlockLdu, side, block));
    for &d in degrees {
        let lower = factor * chain.schur.norm(d);
        let upper = (d >= 1).then(|| {
            let w = fixed_point_step(&t, chain.schur.vector(d - 1));
            match side {
                Side::Right => norm2(&w),
                Side::Left => {
                    let other = apply(&coupling, &w).iter().map(|x| -x).collect::<Vector>();
                    norm2(&concat(&w, &other))
                }
            }
        });
        report.push(d, Some(lower), chain.middle.norm(d), upper);
    }
    if side == Side::Right {
        note_coupled_lower_bound(sys, block, &chain, degrees, &mut report)?;
    }
    Ok(report)
}

/// With `C = A21A11⁻¹` (block 22) or `A12A22⁻¹` (block 11) the right-LDU
/// residual is `[x; Cx + φ(T) r̂]`, so `‖φ(T) r̂‖ / √(1 + ‖C‖²)` is a lower
/// bound that holds where the 1/√2 form can fail. Recorded as a note only.
fn note_coupled_lower_bound(
    sys: &BlockSystem2x2,
    block: SchurBlock,
    chain: &Chain,
    degrees: &[usize],
    report: &mut BoundReport,
) -> Result<()> {
    let c = match block {
        SchurBlock::S22 => sys.a21_a11_inv()?,
        SchurBlock::S11 => sys.a12_a22_inv()?,
    };
    let cn = crate::dense::two_norm(&c);
    let factor = 1.0 / (1.0 + cn * cn).sqrt();
    let slack = report.slack;
    let misses: Vec<usize> = degrees
        .iter()
        .copied()
        .filter(|&d| !slack.holds(factor * chain.schur.norm(d), chain.middle.norm(d), report.scale))
        .collect();
    report.note(if misses.is_empty() {
        format!("coupled lower bound with factor {factor:.6e} holds at every degree")
    } else {
        format!("coupled lower bound with factor {factor:.6e} fails at degrees {misses:?}")
    });
    Ok(())
}

/// Left block-triangular preconditioning (`U11` for block 11, `L22` for 22).
pub fn check_thm_left_tri_gmres(
    sys: &BlockSystem2x2,
    shat: &Matrix,
    r: &BlockVector,
    block: SchurBlock,
    degrees: &[usize],
) -> Result<BoundReport> {
    check_residual(sys, r)?;
    let family = match block {
        SchurBlock::S11 => Family::UpperTriangular,
        SchurBlock::S22 => Family::LowerTriangular,
    };
    let op = preconditioned_operator(sys, shat, family, Side::Left, block)?;
    let t = preconditioned_schur(sys, block, Side::Left, shat)?;
    let chain = run_chain(&op, &r.joined(), &t, r.part(block), max_degree(degrees))?;
    let coupling = match block {
        SchurBlock::S22 => sys.a11_inv_a12()?,
        SchurBlock::S11 => sys.a22_inv_a21()?,
    };
    let mut report = BoundReport::new(
        format!("left block-triangular GMRES ({}{})", family.token(), block),
        Slack::exact(),
        norm2(&r.joined()),
    )
    .with_provenance(provenance(family, Side::Left, block));
    for &d in degrees {
        let upper = (d >= 1).then(|| {
            let w = chain.schur.vector(d - 1);
            let own = fixed_point_step(&t, w);
            let other: Vector = apply(&coupling, w).iter().map(|x| -x).collect();
            norm2(&concat(&own, &other))
        });
        report.push(d, Some(chain.schur.norm(d)), chain.middle.norm(d), upper);
    }
    Ok(report)
}

/// Right block-triangular preconditioning (`AL11⁻¹` for block 11, `AU22⁻¹`
/// for 22): upper bound only.
pub fn check_thm_right_tri_gmres(
    sys: &BlockSystem2x2,
    shat: &Matrix,
    r: &BlockVector,
    block: SchurBlock,
    degrees: &[usize],
) -> Result<BoundReport> {
    check_residual(sys, r)?;
    let family = match block {
        SchurBlock::S11 => Family::LowerTriangular,
        SchurBlock::S22 => Family::UpperTriangular,
    };
    let op = preconditioned_operator(sys, shat, family, Side::Right, block)?;
    let t = preconditioned_schur(sys, block, Side::Right, shat)?;
    let start = match block {
        SchurBlock::S11 => sub(&fixed_point_step(&t, &r.part1), &sys.a12_a22_inv()?.mul_vec(&r.part2)),
        SchurBlock::S22 => sub(&fixed_point_step(&t, &r.part2), &sys.a21_a11_inv()?.mul_vec(&r.part1)),
    };
    let chain = run_chain(&op, &r.joined(), &t, &start, max_degree(degrees))?;
    let mut report = BoundReport::new(
        format!("right block-triangular GMRES ({}{})", family.token(), block),
        Slack::exact(),
        norm2(&r.joined()),
    )
    .with_provenance(provenance(family, Side::Right, block));
    for &d in degrees {
        let upper = (d >= 1).then(|| chain.schur.norm(d - 1));
        report.push(d, None, chain.middle.norm(d), upper);
    }
    Ok(report)
}
