use crate::dense::{axpy, dot, energy_norm, norm2, sub, Matrix, Vector};
use crate::error::{Error, Result};

use super::config::{KrylovConfig, Method};
use super::history::{ConvergenceHistory, Termination};
use super::operator::{IdentityPreconditioner, LinearOperator, Preconditioner};

/// Residual level, relative to the start, below which loss of positivity is
/// treated as convergence rather than indefiniteness.
const EXACT_TOL: f64 = 1e-14;

/// What the CG history records.
#[derive(Debug, Clone, Copy)]
pub enum CgMonitor<'a> {
    /// `‖M⁻¹ r_k‖₂`
    PreconditionedResidual,
    /// `‖x* − x_k‖_W` for a caller-supplied solution and SPD weight `W`.
    Error { exact: &'a [f64], weight: &'a Matrix },
}

impl CgMonitor<'_> {
    fn measure(&self, x: &[f64], z: &[f64]) -> f64 {
        match self {
            CgMonitor::PreconditionedResidual => norm2(z),
            CgMonitor::Error { exact, weight } => energy_norm(weight, &sub(exact, x)),
        }
    }
}

pub fn cg(
    op: &dyn LinearOperator,
    precond: Option<&dyn Preconditioner>,
    b: &[f64],
    x0: &[f64],
    cfg: &KrylovConfig,
    monitor: CgMonitor<'_>,
) -> Result<(Vector, ConvergenceHistory)> {
    cg_with_observer(op, precond, b, x0, cfg, monitor, &mut |_, _| {})
}

/// Preconditioned CG that hands every iterate `x_k` (starting with `x_0`)
/// to `observer`.
pub fn cg_with_observer(
    op: &dyn LinearOperator,
    precond: Option<&dyn Preconditioner>,
    b: &[f64],
    x0: &[f64],
    cfg: &KrylovConfig,
    monitor: CgMonitor<'_>,
    observer: &mut dyn FnMut(usize, &[f64]),
) -> Result<(Vector, ConvergenceHistory)> {
    cfg.validate()?;
    if cfg.method != Method::Cg {
        return Err(Error::InvalidConfig(format!("cg called with method {:?}", cfg.method)));
    }
    let n = op.dim();
    let identity = IdentityPreconditioner(n);
    let precond: &dyn Preconditioner = precond.unwrap_or(&identity);
    if precond.dim() != n || b.len() != n || x0.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "operator {n}, preconditioner {}, rhs {}, initial guess {}",
            precond.dim(),
            b.len(),
            x0.len()
        )));
    }
    if let CgMonitor::Error { exact, weight } = monitor {
        if exact.len() != n || weight.rows() != n || weight.cols() != n {
            return Err(Error::DimensionMismatch("CG error monitor does not match operator".into()));
        }
    }

    let mut x = x0.to_vec();
    let mut r = sub(b, &op.apply(&x));
    let mut z = precond.apply(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let rnorm0 = norm2(&r);

    observer(0, &x);
    let m0 = monitor.measure(&x, &z);
    let mut history = ConvergenceHistory::start(m0);
    if m0 == 0.0 || rnorm0 == 0.0 {
        history.finish(Termination::Converged);
        return Ok((x, history));
    }
    let target = cfg.rel_tol * m0;

    let is_exact = |r: &[f64]| norm2(r) <= EXACT_TOL * rnorm0;
    if rz <= 0.0 {
        return Err(Error::NotSpd(format!("rᵀM⁻¹r = {rz:e} at the initial residual")));
    }

    let termination = loop {
        if history.iterations >= cfg.max_iter {
            break Termination::MaxIterations;
        }
        let ap = op.apply(&p);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            if is_exact(&r) {
                break Termination::HappyBreakdown;
            }
            return Err(Error::NotSpd(format!(
                "pᵀAp = {pap:e} at iteration {}",
                history.iterations
            )));
        }
        let alpha = rz / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        precond.apply_into(&r, &mut z);
        let k = history.iterations + 1;
        observer(k, &x);
        let m = monitor.measure(&x, &z);
        history.push(m);
        if m <= target {
            break Termination::Converged;
        }
        let rz_new = dot(&r, &z);
        if rz_new <= 0.0 {
            if is_exact(&r) {
                break Termination::HappyBreakdown;
            }
            return Err(Error::NotSpd(format!("rᵀM⁻¹r = {rz_new:e} at iteration {k}")));
        }
        let beta = rz_new / rz;
        rz = rz_new;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    };
    history.finish(termination);
    Ok((x, history))
}
