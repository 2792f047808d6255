//! Bounds between ideal GMRES norms, checked with estimated norms.

use std::collections::HashMap;

use crate::block::{BlockSystem2x2, SchurBlock};
use crate::dense::{two_norm, Matrix};
use crate::error::{Error, Result};
use crate::krylov::Side;
use crate::precond::{build, preconditioned_matrix, Family, PreconditionerSpec};

use super::closed_form::preconditioned_schur;
use super::gmres_bounds::preconditioned_operator;
use super::ideal::{ideal_norm, polynomial_norm, IdealNormEstimate, IdealOptions};
use super::report::{BoundReport, Provenance, Slack};

fn neg(m: Matrix) -> Matrix {
    m.scale(-1.0)
}

/// Estimates keyed by operator index and degree; each chain asks for the
/// same Schur estimate at `d` and again as `d − 1` of the next degree.
struct Memo<'a> {
    ops: Vec<&'a Matrix>,
    opts: &'a IdealOptions,
    cache: HashMap<(usize, usize), IdealNormEstimate>,
}

impl<'a> Memo<'a> {
    fn new(ops: Vec<&'a Matrix>, opts: &'a IdealOptions) -> Self {
        Self { ops, opts, cache: HashMap::new() }
    }

    fn get(&mut self, which: usize, degree: usize) -> Result<IdealNormEstimate> {
        if let Some(e) = self.cache.get(&(which, degree)) {
            return Ok(e.clone());
        }
        let e = ideal_norm(self.ops[which], degree, self.opts)?;
        self.cache.insert((which, degree), e.clone());
        Ok(e)
    }
}

fn record(report: &mut BoundReport, label: &str, est: &IdealNormEstimate) {
    report.note(format!(
        "{label} d={}: sampled {:.6e}, minimized {:.6e}",
        est.degree, est.sampled, est.minimized
    ));
}

/// Norm-level chains for block-LDU (either side), left triangular (`U11`,
/// `L22`) and right triangular (`AL11⁻¹`, `AU22⁻¹`) preconditioning. The
/// upper bound uses the estimated degree `d − 1` Schur minimizer, which is a
/// valid choice of polynomial in the bound.
pub fn check_thm_norm_level(
    sys: &BlockSystem2x2,
    shat: &Matrix,
    family: Family,
    side: Side,
    block: SchurBlock,
    degrees: &[usize],
    opts: &IdealOptions,
) -> Result<BoundReport> {
    let covered = match family {
        Family::BlockLdu => true,
        Family::UpperTriangular => matches!((side, block), (Side::Left, SchurBlock::S11) | (Side::Right, SchurBlock::S22)),
        Family::LowerTriangular => matches!((side, block), (Side::Left, SchurBlock::S22) | (Side::Right, SchurBlock::S11)),
        _ => false,
    };
    if !covered {
        return Err(Error::InvalidConfig(format!(
            "no norm-level bound for {}{} with {side:?} preconditioning",
            family.token(),
            block
        )));
    }
    let op = preconditioned_operator(sys, shat, family, side, block)?;
    let t = preconditioned_schur(sys, block, side, shat)?;
    let n = t.rows();
    let fp = &Matrix::identity(n) - &t;
    // Norm of the fixed block column/row multiplying the Schur polynomial,
    // and whether (I − T) is absorbed into the polynomial factor.
    let (coupling, with_fp) = match (family, side, block) {
        (Family::BlockLdu, Side::Left, SchurBlock::S22) => {
            (two_norm(&Matrix::vstack(&neg(sys.a11_inv_a12()?), &Matrix::identity(n))), true)
        }
        (Family::BlockLdu, Side::Left, SchurBlock::S11) => {
            (two_norm(&Matrix::vstack(&Matrix::identity(n), &neg(sys.a22_inv_a21()?))), true)
        }
        (Family::BlockLdu, Side::Right, SchurBlock::S22) => {
            (two_norm(&Matrix::hstack(&neg(sys.a21_a11_inv()?), &Matrix::identity(n))), true)
        }
        (Family::BlockLdu, Side::Right, SchurBlock::S11) => {
            (two_norm(&Matrix::hstack(&Matrix::identity(n), &neg(sys.a12_a22_inv()?))), true)
        }
        (_, Side::Left, SchurBlock::S11) => (two_norm(&Matrix::vstack(&fp, &neg(sys.a22_inv_a21()?))), false),
        (_, Side::Left, SchurBlock::S22) => (two_norm(&Matrix::vstack(&neg(sys.a11_inv_a12()?), &fp)), false),
        (_, Side::Right, SchurBlock::S11) => (two_norm(&Matrix::hstack(&fp, &neg(sys.a12_a22_inv()?))), false),
        (_, Side::Right, SchurBlock::S22) => (two_norm(&Matrix::hstack(&neg(sys.a21_a11_inv()?), &fp)), false),
    };
    let mut report = BoundReport::new(
        format!("ideal-norm chain {}{} ({side:?})", family.token(), block),
        Slack::estimated(),
        1.0,
    )
    .with_provenance(Provenance {
        spec: Some(format!("{}:{}:user", family.token(), block.label())),
        side: Some(side),
        schur_block: Some(block),
        ..Provenance::default()
    });
    let mut memo = Memo::new(vec![&op, &t], opts);
    for &d in degrees {
        let middle = memo.get(0, d)?;
        let lower = memo.get(1, d)?;
        record(&mut report, "preconditioned", &middle);
        record(&mut report, "schur", &lower);
        let upper = if d >= 1 {
            let prev = memo.get(1, d - 1)?;
            let poly = if with_fp { prev.polynomial.times_one_minus_t() } else { prev.polynomial };
            Some(coupling * polynomial_norm(&t, &poly))
        } else {
            None
        };
        report.push(d, Some(lower.value()), middle.value(), upper);
    }
    Ok(report)
}

/// Block-Jacobi chain between the degree-`2d` ideal norm of `D⁻¹A` (or
/// `AD⁻¹`) and the degree `d`, `d − 1` ideal norms of `A_kk⁻¹S_kk` (or
/// `S_kk A_kk⁻¹`).
pub fn check_thm_jacobi_norms(
    sys: &BlockSystem2x2,
    degrees: &[usize],
    side: Side,
    opts: &IdealOptions,
) -> Result<BoundReport> {
    let p = build(sys, &PreconditionerSpec::block_jacobi())?;
    let op = preconditioned_matrix(sys, &p, side);
    let t1 = preconditioned_schur(sys, SchurBlock::S11, side, sys.a11())?;
    let t2 = preconditioned_schur(sys, SchurBlock::S22, side, sys.a22())?;
    let (c1, c2) = match side {
        Side::Left => (two_norm(&sys.a11_inv_a12()?), two_norm(&sys.a22_inv_a21()?)),
        Side::Right => (two_norm(&sys.a21_a11_inv()?), two_norm(&sys.a12_a22_inv()?)),
    };
    let mut report = BoundReport::new(format!("block-Jacobi ideal norms ({side:?})"), Slack::estimated(), 1.0)
        .with_provenance(Provenance {
            spec: Some("BD".into()),
            side: Some(side),
            ..Provenance::default()
        });
    let mut memo = Memo::new(vec![&op, &t1, &t2], opts);
    for &d in degrees {
        let middle = memo.get(0, 2 * d)?;
        let k1 = memo.get(1, d)?;
        let k2 = memo.get(2, d)?;
        record(&mut report, "jacobi", &middle);
        record(&mut report, "schur11", &k1);
        record(&mut report, "schur22", &k2);
        let lower = k1.value().min(k2.value()) / (1.0 + c1.min(c2));
        let upper = if d >= 1 {
            let p1 = memo.get(1, d - 1)?;
            let p2 = memo.get(2, d - 1)?;
            Some(p1.value().min(p2.value()) * (c1 + c2))
        } else {
            None
        };
        report.push(d, Some(lower), middle.value(), upper);
    }
    Ok(report)
}
