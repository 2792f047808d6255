use std::f64::consts::PI;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;

use crate::block::BlockSystem2x2;
use crate::dense::rng::{gaussian_vector, seeded_rng, DEFAULT_SEED};
use crate::dense::{Matrix, Vector};
use crate::error::{Error, Result};
use crate::krylov::{fgmres, KrylovConfig};
use crate::precond::{build, InnerSolve, PreconditionerSpec};

pub const OSEEN_CSV_HEADER: &str = "family,inner_tol,global_tol,iters,converged";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wind {
    /// `(1, 1)/√2`
    Constant,
    /// `(sin πx cos πy, −cos πx sin πy)`, a single vortex.
    Recirculating,
}

impl Wind {
    fn at(self, x: f64, y: f64) -> (f64, f64) {
        match self {
            Wind::Constant => (1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt()),
            Wind::Recirculating => (
                (PI * x).sin() * (PI * y).cos(),
                -(PI * x).cos() * (PI * y).sin(),
            ),
        }
    }
}

impl fmt::Display for Wind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Wind::Constant => "const",
            Wind::Recirculating => "recirc",
        })
    }
}

impl FromStr for Wind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "const" | "constant" => Ok(Wind::Constant),
            "recirc" | "recirculating" | "vortex" => Ok(Wind::Recirculating),
            _ => Err(Error::Parse(format!("unknown wind {s:?}"))),
        }
    }
}

/// Finite-difference Oseen-like system on the unit square with `m × m`
/// interior nodes per field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OseenParams {
    pub m: usize,
    pub nu: f64,
    pub eps: f64,
    pub wind: Wind,
    /// Seed of the random right-hand side.
    pub seed: u64,
}

impl Default for OseenParams {
    fn default() -> Self {
        Self {
            m: 24,
            nu: 1e-2,
            eps: 1e-2,
            wind: Wind::Constant,
            seed: DEFAULT_SEED,
        }
    }
}

impl OseenParams {
    pub fn validate(&self) -> Result<()> {
        if self.m < 3 {
            return Err(Error::InvalidConfig(format!("Oseen grid needs m >= 3, got {}", self.m)));
        }
        if !(self.nu > 0.0) || !self.nu.is_finite() {
            return Err(Error::InvalidConfig(format!("viscosity must be positive, got {}", self.nu)));
        }
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return Err(Error::InvalidConfig(format!("stabilization must be positive, got {}", self.eps)));
        }
        Ok(())
    }
}

/// `A11 = blkdiag(C, C)` with `C` the 5-point diffusion plus first-order
/// upwind advection, `A12` the forward-difference gradient, `A21 = −A12ᵀ`
/// (the backward-difference divergence) and `A22 = −εI`. Dirichlet zero
/// boundaries; pressure values outside the grid are taken as zero.
pub fn oseen_fd(p: &OseenParams) -> Result<(BlockSystem2x2, Vector)> {
    p.validate()?;
    let m = p.m;
    let nn = m * m;
    let h = 1.0 / (m + 1) as f64;
    let idx = |i: usize, j: usize| i * m + j;
    let inside = |i: isize, j: isize| i >= 0 && j >= 0 && (i as usize) < m && (j as usize) < m;

    let mut c = Matrix::zeros(nn, nn);
    let diff = p.nu / (h * h);
    for i in 0..m {
        for j in 0..m {
            let k = idx(i, j);
            let (wx, wy) = p.wind.at((i + 1) as f64 * h, (j + 1) as f64 * h);
            c[(k, k)] += 4.0 * diff;
            for (di, dj) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                let (ii, jj) = (i as isize + di, j as isize + dj);
                if inside(ii, jj) {
                    c[(k, idx(ii as usize, jj as usize))] -= diff;
                }
            }
            for (w, di, dj) in [(wx, 1isize, 0isize), (wy, 0, 1)] {
                // upwind: difference against the node the wind comes from
                let s = if w >= 0.0 { -1 } else { 1 };
                c[(k, k)] += w.abs() / h;
                let (ii, jj) = (i as isize + s * di, j as isize + s * dj);
                if inside(ii, jj) {
                    c[(k, idx(ii as usize, jj as usize))] -= w.abs() / h;
                }
            }
        }
    }

    let mut a11 = Matrix::zeros(2 * nn, 2 * nn);
    a11.set_block(0, 0, &c);
    a11.set_block(nn, nn, &c);

    let mut a12 = Matrix::zeros(2 * nn, nn);
    for i in 0..m {
        for j in 0..m {
            let k = idx(i, j);
            a12[(k, k)] = -1.0 / h;
            a12[(nn + k, k)] = -1.0 / h;
            if i + 1 < m {
                a12[(k, idx(i + 1, j))] = 1.0 / h;
            }
            if j + 1 < m {
                a12[(nn + k, idx(i, j + 1))] = 1.0 / h;
            }
        }
    }
    let a21 = a12.transpose().scale(-1.0);
    let a22 = Matrix::identity(nn).scale(-p.eps);
    let mut rng = seeded_rng(p.seed);
    let b = gaussian_vector(&mut rng, 3 * nn);
    Ok((BlockSystem2x2::new(a11, a12, a21, a22)?, b))
}

/// One cell of an Oseen iteration table.
#[derive(Debug, Clone, PartialEq)]
pub struct OseenRow {
    /// Family token, with `:neg` appended when the Schur approximation is negated.
    pub family: String,
    /// `None` for direct inner solves.
    pub inner_tol: Option<f64>,
    pub global_tol: f64,
    pub iters: usize,
    pub converged: bool,
}

/// Right-preconditioned FGMRES from `x₀ = 0` for every combination of
/// preconditioner, inner tolerance and global tolerance. Inner tolerances
/// replace whatever inner solve the specs carry. Rows come back in input
/// order; the sweep runs on the current rayon pool.
pub fn oseen_report(
    sys: &BlockSystem2x2,
    rhs: &[f64],
    specs: &[PreconditionerSpec],
    inner_tols: &[Option<f64>],
    global_tols: &[f64],
    max_iter: usize,
) -> Result<Vec<OseenRow>> {
    let mut jobs = Vec::new();
    for spec in specs {
        for &inner in inner_tols {
            for &tol in global_tols {
                jobs.push((spec, inner, tol));
            }
        }
    }
    jobs.par_iter()
        .map(|&(spec, inner, tol)| {
            let mut spec = spec.clone();
            spec.inner_solve = match inner {
                Some(t) => InnerSolve::Iterative { rel_tol: t, max_iter: crate::precond::DEFAULT_INNER_MAX_ITER },
                None => InnerSolve::Direct,
            };
            let p = build(sys, &spec)?;
            let cfg = KrylovConfig::fgmres(tol, max_iter);
            let x0 = vec![0.0; rhs.len()];
            let (iters, converged) = match fgmres(sys, &p, rhs, &x0, &cfg) {
                Ok((_, h)) => (h.iterations, h.converged),
                Err(Error::NonFinite(_)) => (max_iter, false),
                Err(e) => return Err(e),
            };
            Ok(OseenRow {
                family: family_label(&spec),
                inner_tol: inner,
                global_tol: tol,
                iters,
                converged,
            })
        })
        .collect()
}

pub(crate) fn family_label(spec: &PreconditionerSpec) -> String {
    let mut s = spec.family.token().to_string();
    if spec.negate_schur {
        s.push_str(":neg");
    }
    s
}

pub fn rows_to_csv(rows: &[OseenRow]) -> String {
    let mut out = String::from(OSEEN_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let inner = match r.inner_tol {
            Some(t) => format!("{t:e}"),
            None => "direct".to_string(),
        };
        let _ = writeln!(out, "{},{inner},{:e},{},{}", r.family, r.global_tol, r.iters, r.converged);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::SchurBlock;
    use crate::precond::{Family, SchurApprox};

    fn small() -> OseenParams {
        OseenParams { m: 6, ..OseenParams::default() }
    }

    #[test]
    fn structure() {
        let (s, b) = oseen_fd(&small()).unwrap();
        assert_eq!((s.n1(), s.n2(), b.len()), (72, 36, 108));
        assert_eq!(s.a22(), &Matrix::identity(36).scale(-1e-2));
        assert_eq!(s.a21(), &s.a12().transpose().scale(-1.0));
        // zero row sums of the diffusion stencil away from the boundary,
        // plus the upwind terms that also sum to zero there
        let c = s.a11();
        let k = 2 * 6 + 2;
        let row_sum: f64 = c.row(k).iter().sum();
        assert!(row_sum.abs() < 1e-9);
        assert!(s.schur_complement(SchurBlock::S22).is_ok());
    }

    #[test]
    fn recirculating_wind_changes_only_a11() {
        let (a, _) = oseen_fd(&small()).unwrap();
        let (b, _) = oseen_fd(&OseenParams { wind: Wind::Recirculating, ..small() }).unwrap();
        assert_ne!(a.a11(), b.a11());
        assert_eq!(a.a12(), b.a12());
    }

    #[test]
    fn exact_triangular_takes_at_most_three_iterations() {
        let (s, b) = oseen_fd(&small()).unwrap();
        let specs = [
            PreconditionerSpec::new(Family::LowerTriangular, SchurBlock::S22, SchurApprox::ExactSchur),
            PreconditionerSpec::new(Family::UpperTriangular, SchurBlock::S22, SchurApprox::ExactSchur),
        ];
        let rows = oseen_report(&s, &b, &specs, &[None], &[1e-10], 50).unwrap();
        for r in &rows {
            assert!(r.converged && r.iters <= 3, "{r:?}");
        }
        let csv = rows_to_csv(&rows);
        assert!(csv.starts_with("family,inner_tol,global_tol,iters,converged\nLT,direct,1e-10,"));
    }
}
