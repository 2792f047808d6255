use crate::dense::{norm2, sub, Vector};
use crate::error::{Error, Result};

use super::arnoldi::Arnoldi;
use super::config::{KrylovConfig, Method, Side};
use super::history::{ConvergenceHistory, Termination};
use super::operator::{ApplyStatus, IdentityPreconditioner, LinearOperator, Preconditioner};

/// Residual below this fraction of `‖r₀‖` at breakdown counts as exact.
const HAPPY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Flavor {
    Left,
    Right,
    Flexible,
}

/// Preconditioned GMRES. With left preconditioning the history records
/// `‖M⁻¹(b − A x_d)‖`, with right preconditioning `‖b − A x_d‖`.
pub fn gmres(
    op: &dyn LinearOperator,
    precond: Option<&dyn Preconditioner>,
    b: &[f64],
    x0: &[f64],
    cfg: &KrylovConfig,
) -> Result<(Vector, ConvergenceHistory)> {
    if cfg.method != Method::Gmres {
        return Err(Error::InvalidConfig(format!(
            "gmres called with method {:?}",
            cfg.method
        )));
    }
    let flavor = match cfg.side {
        Side::Left => Flavor::Left,
        Side::Right => Flavor::Right,
    };
    run(op, precond, b, x0, cfg, flavor)
}

/// Flexible GMRES: stores every preconditioned direction, so the
/// preconditioner may change from one application to the next.
pub fn fgmres(
    op: &dyn LinearOperator,
    precond: &dyn Preconditioner,
    b: &[f64],
    x0: &[f64],
    cfg: &KrylovConfig,
) -> Result<(Vector, ConvergenceHistory)> {
    if cfg.method != Method::Fgmres {
        return Err(Error::InvalidConfig(format!(
            "fgmres called with method {:?}",
            cfg.method
        )));
    }
    run(op, Some(precond), b, x0, cfg, Flavor::Flexible)
}

fn check_dims(op: &dyn LinearOperator, precond: &dyn Preconditioner, b: &[f64], x0: &[f64]) -> Result<()> {
    let n = op.dim();
    if precond.dim() != n || b.len() != n || x0.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "operator {n}, preconditioner {}, rhs {}, initial guess {}",
            precond.dim(),
            b.len(),
            x0.len()
        )));
    }
    Ok(())
}

fn run(
    op: &dyn LinearOperator,
    precond: Option<&dyn Preconditioner>,
    b: &[f64],
    x0: &[f64],
    cfg: &KrylovConfig,
    flavor: Flavor,
) -> Result<(Vector, ConvergenceHistory)> {
    cfg.validate()?;
    let n = op.dim();
    let identity = IdentityPreconditioner(n);
    let precond: &dyn Preconditioner = precond.unwrap_or(&identity);
    check_dims(op, precond, b, x0)?;
    crate::dense::ensure_finite(b, "rhs")?;

    let mut degraded = 0usize;
    let mut note = |s: ApplyStatus| {
        if s == ApplyStatus::Degraded {
            degraded += 1;
        }
    };
    let prec = |v: &[f64], note: &mut dyn FnMut(ApplyStatus)| -> Vector {
        let mut z = vec![0.0; n];
        note(precond.apply_into(v, &mut z));
        z
    };

    let residual = |x: &[f64], note: &mut dyn FnMut(ApplyStatus)| -> Vector {
        let r = sub(b, &op.apply(x));
        if flavor == Flavor::Left {
            prec(&r, note)
        } else {
            r
        }
    };

    let mut x = x0.to_vec();
    let mut r = residual(&x, &mut note);
    let r0 = norm2(&r);
    let mut history = ConvergenceHistory::start(r0);
    let target = cfg.rel_tol * r0;
    if r0 == 0.0 {
        history.finish(Termination::Converged);
        return Ok((x, history));
    }

    let termination = loop {
        let remaining = cfg.max_iter - history.iterations;
        if remaining == 0 {
            break Termination::MaxIterations;
        }
        let cycle = cfg.restart.unwrap_or(cfg.max_iter).min(remaining).min(n.max(1));
        let mut arnoldi = Arnoldi::new(&r);
        let mut zs: Vec<Vector> = Vec::new();
        let mut reached = false;
        for _ in 0..cycle {
            let v = arnoldi.current().to_vec();
            let w = match flavor {
                Flavor::Left => prec(&op.apply(&v), &mut note),
                Flavor::Right => op.apply(&prec(&v, &mut note)),
                Flavor::Flexible => {
                    let z = prec(&v, &mut note);
                    let w = op.apply(&z);
                    zs.push(z);
                    w
                }
            };
            let est = arnoldi.step(w);
            history.push(est);
            if est <= target {
                reached = true;
                break;
            }
            if arnoldi.broke_down() {
                break;
            }
        }

        let k = arnoldi.steps();
        let Some(y) = arnoldi.solve(k) else {
            break Termination::Breakdown;
        };
        let update = match flavor {
            Flavor::Left => arnoldi.combine(&y),
            Flavor::Right => prec(&arnoldi.combine(&y), &mut note),
            Flavor::Flexible => {
                let mut u = vec![0.0; n];
                for (z, c) in zs.iter().zip(&y) {
                    crate::dense::axpy(*c, z, &mut u);
                }
                u
            }
        };
        x.iter_mut().zip(&update).for_each(|(a, b)| *a += b);

        if reached {
            break Termination::Converged;
        }
        if arnoldi.broke_down() {
            break if arnoldi.residual_estimate() <= HAPPY_TOL * r0 {
                Termination::HappyBreakdown
            } else {
                Termination::Breakdown
            };
        }
        r = residual(&x, &mut note);
    };
    history.finish(termination);
    history.degraded_applies = degraded;
    crate::dense::ensure_finite(&x, "solution")?;
    Ok((x, history))
}

/// Minimal residual vectors `φ^(d)(T) r₀` for `d = 0..=max_degree`, with
/// `φ^(d)` the consistent polynomial of degree `d` minimizing `‖p(T) r₀‖₂`.
#[derive(Debug, Clone)]
pub struct MinimalResiduals {
    pub vectors: Vec<Vector>,
}

impl MinimalResiduals {
    pub fn norm(&self, d: usize) -> f64 {
        norm2(self.vector(d))
    }

    pub fn norms(&self) -> Vec<f64> {
        self.vectors.iter().map(|v| norm2(v)).collect()
    }

    /// Past an invariant subspace the minimizer no longer changes.
    pub fn vector(&self, d: usize) -> &Vector {
        &self.vectors[d.min(self.vectors.len() - 1)]
    }
}

/// Runs unrestarted Arnoldi on `T` from `r₀` and extracts the minimal
/// residual vector of every degree up to `max_degree`.
pub fn minimal_residuals(op: &dyn LinearOperator, r0: &[f64], max_degree: usize) -> Result<MinimalResiduals> {
    let n = op.dim();
    if r0.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "operator {n}, residual {}",
            r0.len()
        )));
    }
    let mut arnoldi = Arnoldi::new(r0);
    let mut vectors = vec![r0.to_vec()];
    while arnoldi.steps() < max_degree && !arnoldi.broke_down() {
        let w = op.apply(arnoldi.current());
        arnoldi.step(w);
        let d = arnoldi.steps();
        let r = arnoldi
            .residual_vector(d, n)
            .ok_or_else(|| Error::Precondition(format!("singular least-squares problem at degree {d}")))?;
        vectors.push(r);
    }
    Ok(MinimalResiduals { vectors })
}
