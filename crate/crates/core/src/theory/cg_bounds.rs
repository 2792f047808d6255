//! CG error bounds for block-LDU preconditioning of SPD systems.

use crate::block::{BlockSystem2x2, BlockVector, SchurBlock};
use crate::dense::{energy_norm, is_spd, norm2, sub, Matrix, Vector};
use crate::error::{Error, Result};
use crate::krylov::{cg_with_observer, CgMonitor, KrylovConfig, LinearOperator, Preconditioner};
use crate::precond::{build, Family, PreconditionerSpec};

use super::report::{BoundReport, Provenance, Slack};

/// Residual level at which CG is stopped as exactly converged.
const CG_STOP: f64 = 1e-15;

/// `Ŝ⁻¹` as a preconditioner.
struct DirectInverse {
    lu: crate::dense::LuFactors,
}

impl Preconditioner for DirectInverse {
    fn dim(&self) -> usize {
        self.lu.dim()
    }

    fn apply_into(&self, v: &[f64], z: &mut [f64]) -> crate::krylov::ApplyStatus {
        self.lu.solve_into(v, z);
        crate::krylov::ApplyStatus::Exact
    }
}

/// Errors `x* − x_k` of preconditioned CG on `op x = op x*` from `x₀ = 0`,
/// for `k = 0..=max_degree`; after exact convergence the last one repeats.
fn cg_errors(op: &dyn LinearOperator, precond: &dyn Preconditioner, exact: &[f64], max_degree: usize) -> Result<Vec<Vector>> {
    let n = op.dim();
    if norm2(exact) == 0.0 {
        return Ok(vec![vec![0.0; n]; max_degree + 1]);
    }
    let b = op.apply(exact);
    let cfg = KrylovConfig::cg(CG_STOP, max_degree.max(1));
    let mut errors: Vec<Vector> = Vec::with_capacity(max_degree + 1);
    cg_with_observer(
        op,
        Some(precond),
        &b,
        &vec![0.0; n],
        &cfg,
        CgMonitor::PreconditionedResidual,
        &mut |_, x| errors.push(sub(exact, x)),
    )?;
    while errors.len() <= max_degree {
        let last = errors.last().expect("x0 is always observed").clone();
        errors.push(last);
    }
    Ok(errors)
}

/// Lower and upper bounds per degree for the Schur problem alone: the
/// `S`-norm CG error at degree `d`, and the `S`-norm of one fixed-point
/// step applied to the CG error at `d − 1`. Only `S`, `Ŝ` and `e_k` enter.
pub fn schur_cg_bounds(s: &Matrix, shat: &Matrix, e_k: &[f64], degrees: &[usize]) -> Result<Vec<(f64, Option<f64>)>> {
    if !is_spd(s) {
        return Err(Error::NotSpd("Schur complement is not SPD".into()));
    }
    if !is_spd(shat) {
        return Err(Error::NotSpd("Schur approximation is not SPD".into()));
    }
    let lu = crate::dense::LuFactors::new(shat)?;
    let dmax = degrees.iter().copied().max().unwrap_or(0);
    let pre = DirectInverse { lu };
    let errors = cg_errors(s, &pre, e_k, dmax)?;
    Ok(degrees
        .iter()
        .map(|&d| {
            let lower = energy_norm(s, &errors[d]);
            let upper = (d >= 1).then(|| {
                let prev = &errors[d - 1];
                let step = sub(prev, &pre.apply(&s.mul_vec(prev)));
                energy_norm(s, &step)
            });
            (lower, upper)
        })
        .collect())
}

/// The chain `‖φ_kk(Ŝ⁻¹S) e_k‖_S ≤ ‖φ(M_kk⁻¹A) e‖_A ≤ ‖(I − Ŝ⁻¹S) φ_kk^{(d−1)} e_k‖_S`
/// with both minimizers realized by CG.
pub fn check_thm_cg(
    sys: &BlockSystem2x2,
    shat: &Matrix,
    e: &BlockVector,
    block: SchurBlock,
    degrees: &[usize],
) -> Result<BoundReport> {
    if e.part1.len() != sys.n1() || e.part2.len() != sys.n2() {
        return Err(Error::DimensionMismatch("error vector does not match the system".into()));
    }
    let a = sys.assemble();
    if !is_spd(&a) {
        return Err(Error::NotSpd("assembled system is not SPD".into()));
    }
    let s = sys.schur_complement(block)?;
    let bounds = schur_cg_bounds(&s, shat, e.part(block), degrees)?;

    let spec = PreconditionerSpec::with_user(Family::BlockLdu, block, shat.clone());
    let p = build(sys, &spec)?;
    let full = e.joined();
    let dmax = degrees.iter().copied().max().unwrap_or(0);
    let errors = cg_errors(&a, &p, &full, dmax)?;

    let mut report = BoundReport::new(format!("block-LDU CG ({block})"), Slack::exact(), energy_norm(&a, &full))
        .with_provenance(Provenance {
            spec: Some(format!("LDU:{}:user", block.label())),
            schur_block: Some(block),
            ..Provenance::default()
        });
    for (&d, (lower, upper)) in degrees.iter().zip(bounds) {
        report.push(d, Some(lower), energy_norm(&a, &errors[d]), upper);
    }
    Ok(report)
}
