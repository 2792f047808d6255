use crate::dense::{norm2, sub, Vector};
use crate::error::{Error, Result};

use super::config::{KrylovConfig, Method};
use super::history::{ConvergenceHistory, Termination};
use super::operator::{ApplyStatus, LinearOperator, Preconditioner};

/// Growth of the residual, relative to the start, treated as divergence.
pub const DIVERGENCE_FACTOR: f64 = 1e12;

/// Stationary iteration `x_{k+1} = x_k + P⁻¹ (b − A x_k)`; the history holds
/// unpreconditioned residual norms.
pub fn fixed_point(
    op: &dyn LinearOperator,
    precond: &dyn Preconditioner,
    b: &[f64],
    x0: &[f64],
    cfg: &KrylovConfig,
) -> Result<(Vector, ConvergenceHistory)> {
    cfg.validate()?;
    if cfg.method != Method::FixedPoint {
        return Err(Error::InvalidConfig(format!(
            "fixed_point called with method {:?}",
            cfg.method
        )));
    }
    let n = op.dim();
    if precond.dim() != n || b.len() != n || x0.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "operator {n}, preconditioner {}, rhs {}, initial guess {}",
            precond.dim(),
            b.len(),
            x0.len()
        )));
    }
    let mut x = x0.to_vec();
    let mut r = sub(b, &op.apply(&x));
    let r0 = norm2(&r);
    let mut history = ConvergenceHistory::start(r0);
    if r0 == 0.0 {
        history.finish(Termination::Converged);
        return Ok((x, history));
    }
    let mut z = vec![0.0; n];
    let termination = loop {
        if history.iterations >= cfg.max_iter {
            break Termination::MaxIterations;
        }
        if precond.apply_into(&r, &mut z) == ApplyStatus::Degraded {
            history.degraded_applies += 1;
        }
        x.iter_mut().zip(&z).for_each(|(a, b)| *a += b);
        r = sub(b, &op.apply(&x));
        let rn = norm2(&r);
        history.push(rn);
        if !rn.is_finite() || rn > DIVERGENCE_FACTOR * r0 {
            break Termination::Diverged;
        }
        if rn <= cfg.rel_tol * r0 {
            break Termination::Converged;
        }
    };
    history.finish(termination);
    Ok((x, history))
}
