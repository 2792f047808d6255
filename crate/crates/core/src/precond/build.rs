use crate::block::{BlockSystem2x2, SchurBlock};
use crate::dense::{axpy, LuFactors, Matrix, Vector};
use crate::error::{Error, Result};
use crate::krylov::{gmres, ApplyStatus, KrylovConfig, Preconditioner, Side};

use super::spec::{Family, InnerSolve, PreconditionerSpec, SchurApprox};

/// Solver for one diagonal block of the preconditioner.
enum BlockSolve {
    Direct { lu: LuFactors, sign: f64 },
    Iterative { matrix: Matrix, rel_tol: f64, max_iter: usize },
}

impl BlockSolve {
    fn solve(&self, v: &[f64]) -> (Vector, ApplyStatus) {
        match self {
            BlockSolve::Direct { lu, sign } => {
                let mut x = lu.solve(v);
                if *sign < 0.0 {
                    x.iter_mut().for_each(|t| *t = -*t);
                }
                (x, ApplyStatus::Exact)
            }
            BlockSolve::Iterative { matrix, rel_tol, max_iter } => {
                let cfg = KrylovConfig::gmres(Side::Right, *rel_tol, *max_iter);
                let x0 = vec![0.0; v.len()];
                match gmres(matrix, None, v, &x0, &cfg) {
                    Ok((x, h)) if h.converged => (x, ApplyStatus::Converged),
                    Ok((x, _)) => (x, ApplyStatus::Degraded),
                    Err(_) => (x0, ApplyStatus::Degraded),
                }
            }
        }
    }
}

/// A built preconditioner; `apply` computes `P⁻¹ v`.
pub struct ApplyablePreconditioner {
    spec: PreconditionerSpec,
    shat: Matrix,
    n1: usize,
    n2: usize,
    a12: Matrix,
    a21: Matrix,
    a22: Matrix,
    a11: Matrix,
    solve1: BlockSolve,
    solve2: BlockSolve,
}

/// Materializes the Schur approximation requested by `spec`.
pub fn schur_approximation(sys: &BlockSystem2x2, spec: &PreconditionerSpec) -> Result<Matrix> {
    let k = spec.schur_block;
    let kdim = sys.block_dim(k);
    let m = match &spec.schur_approx {
        SchurApprox::DiagonalBlock => sys.diag_block(k).clone(),
        SchurApprox::ExactSchur => sys.schur_complement(k)?,
        SchurApprox::DiagonalSchur => diagonal_schur(sys, k)?,
        SchurApprox::UserMatrix(m) => m.clone(),
        SchurApprox::UserFile(p) => crate::mtx::read_matrix(p)?,
    };
    if m.rows() != kdim || m.cols() != kdim {
        return Err(Error::DimensionMismatch(format!(
            "Schur approximation is {}x{} but block {k} has size {kdim}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(m)
}

/// `A_kk − A_kj diag(A_jj)⁻¹ A_jk`
pub fn diagonal_schur(sys: &BlockSystem2x2, k: SchurBlock) -> Result<Matrix> {
    let (akk, akj, ajj, ajk) = match k {
        SchurBlock::S22 => (sys.a22(), sys.a21(), sys.a11(), sys.a12()),
        SchurBlock::S11 => (sys.a11(), sys.a12(), sys.a22(), sys.a21()),
    };
    let d = ajj.diagonal();
    if let Some(i) = d.iter().position(|&x| x == 0.0) {
        return Err(Error::Precondition(format!(
            "diagonal Schur approximation needs a nonzero diagonal (zero at {i})"
        )));
    }
    let scaled = Matrix::from_fn(ajk.rows(), ajk.cols(), |i, j| ajk[(i, j)] / d[i]);
    Ok(akk - &(akj * &scaled))
}

pub fn build(sys: &BlockSystem2x2, spec: &PreconditionerSpec) -> Result<ApplyablePreconditioner> {
    let shat = schur_approximation(sys, spec)?;
    let sign = if spec.negate_schur { -1.0 } else { 1.0 };
    let schur_lu = LuFactors::new(&shat).map_err(|e| match e {
        Error::Singular { column, pivot } => Error::Precondition(format!(
            "Schur approximation is singular (column {column}, pivot {pivot:e})"
        )),
        other => other,
    })?;
    let schur_solve = BlockSolve::Direct { lu: schur_lu, sign };
    let other = spec.schur_block.other();
    let other_solve = match spec.inner_solve {
        InnerSolve::Direct => BlockSolve::Direct {
            lu: sys.lu(other)?.clone(),
            sign: 1.0,
        },
        InnerSolve::Iterative { rel_tol, max_iter } => {
            if !(rel_tol > 0.0) || max_iter == 0 {
                return Err(Error::InvalidConfig(format!(
                    "inner solve needs a positive tolerance and iteration cap, got {rel_tol}/{max_iter}"
                )));
            }
            BlockSolve::Iterative {
                matrix: sys.diag_block(other).clone(),
                rel_tol,
                max_iter,
            }
        }
    };
    let (solve1, solve2) = match spec.schur_block {
        SchurBlock::S11 => (schur_solve, other_solve),
        SchurBlock::S22 => (other_solve, schur_solve),
    };
    Ok(ApplyablePreconditioner {
        spec: spec.clone(),
        shat,
        n1: sys.n1(),
        n2: sys.n2(),
        a11: sys.a11().clone(),
        a12: sys.a12().clone(),
        a21: sys.a21().clone(),
        a22: sys.a22().clone(),
        solve1,
        solve2,
    })
}

impl ApplyablePreconditioner {
    pub fn spec(&self) -> &PreconditionerSpec {
        &self.spec
    }

    /// The Schur approximation before any sign flip.
    pub fn schur_approx(&self) -> &Matrix {
        &self.shat
    }

    fn block_diag(&self, v1: &[f64], v2: &[f64], st: &mut ApplyStatus) -> (Vector, Vector) {
        let (z1, s1) = self.solve1.solve(v1);
        let (z2, s2) = self.solve2.solve(v2);
        *st = st.merge(s1).merge(s2);
        (z1, z2)
    }

    fn lower(&self, v1: &[f64], v2: &[f64], st: &mut ApplyStatus) -> (Vector, Vector) {
        let (z1, s1) = self.solve1.solve(v1);
        let mut rhs = v2.to_vec();
        axpy(-1.0, &self.a21.mul_vec(&z1), &mut rhs);
        let (z2, s2) = self.solve2.solve(&rhs);
        *st = st.merge(s1).merge(s2);
        (z1, z2)
    }

    fn upper(&self, v1: &[f64], v2: &[f64], st: &mut ApplyStatus) -> (Vector, Vector) {
        let (z2, s2) = self.solve2.solve(v2);
        let mut rhs = v1.to_vec();
        axpy(-1.0, &self.a12.mul_vec(&z2), &mut rhs);
        let (z1, s1) = self.solve1.solve(&rhs);
        *st = st.merge(s1).merge(s2);
        (z1, z2)
    }

    fn ldu(&self, v1: &[f64], v2: &[f64], st: &mut ApplyStatus) -> (Vector, Vector) {
        match self.spec.schur_block {
            SchurBlock::S22 => {
                let (y1, s1) = self.solve1.solve(v1);
                let mut rhs = v2.to_vec();
                axpy(-1.0, &self.a21.mul_vec(&y1), &mut rhs);
                let (z2, s2) = self.solve2.solve(&rhs);
                let (c1, s3) = self.solve1.solve(&self.a12.mul_vec(&z2));
                *st = st.merge(s1).merge(s2).merge(s3);
                let mut z1 = y1;
                axpy(-1.0, &c1, &mut z1);
                (z1, z2)
            }
            SchurBlock::S11 => {
                let (y2, s2) = self.solve2.solve(v2);
                let mut rhs = v1.to_vec();
                axpy(-1.0, &self.a12.mul_vec(&y2), &mut rhs);
                let (z1, s1) = self.solve1.solve(&rhs);
                let (c2, s3) = self.solve2.solve(&self.a21.mul_vec(&z1));
                *st = st.merge(s1).merge(s2).merge(s3);
                let mut z2 = y2;
                axpy(-1.0, &c2, &mut z2);
                (z1, z2)
            }
        }
    }

    /// Blocks of `v − A z`.
    fn residual_after(&self, v1: &[f64], v2: &[f64], z1: &[f64], z2: &[f64]) -> (Vector, Vector) {
        let mut r1 = v1.to_vec();
        axpy(-1.0, &self.a11.mul_vec(z1), &mut r1);
        axpy(-1.0, &self.a12.mul_vec(z2), &mut r1);
        let mut r2 = v2.to_vec();
        axpy(-1.0, &self.a21.mul_vec(z1), &mut r2);
        axpy(-1.0, &self.a22.mul_vec(z2), &mut r2);
        (r1, r2)
    }

    /// Two triangular sweeps composed: `z = first(v); z += second(v − A z)`.
    fn two_sweeps(&self, v1: &[f64], v2: &[f64], lower_first: bool, st: &mut ApplyStatus) -> (Vector, Vector) {
        let (mut z1, mut z2) = if lower_first {
            self.lower(v1, v2, st)
        } else {
            self.upper(v1, v2, st)
        };
        let (r1, r2) = self.residual_after(v1, v2, &z1, &z2);
        let (c1, c2) = if lower_first {
            self.upper(&r1, &r2, st)
        } else {
            self.lower(&r1, &r2, st)
        };
        axpy(1.0, &c1, &mut z1);
        axpy(1.0, &c2, &mut z2);
        (z1, z2)
    }
}

impl Preconditioner for ApplyablePreconditioner {
    fn dim(&self) -> usize {
        self.n1 + self.n2
    }

    fn apply_into(&self, v: &[f64], z: &mut [f64]) -> ApplyStatus {
        assert_eq!(v.len(), self.n1 + self.n2, "preconditioner input has the wrong length");
        let (v1, v2) = v.split_at(self.n1);
        let mut st = ApplyStatus::Exact;
        let (z1, z2) = match self.spec.family {
            Family::BlockDiagonal => self.block_diag(v1, v2, &mut st),
            Family::LowerTriangular => self.lower(v1, v2, &mut st),
            Family::UpperTriangular => self.upper(v1, v2, &mut st),
            Family::BlockLdu => self.ldu(v1, v2, &mut st),
            Family::SymTriLu => self.two_sweeps(v1, v2, true, &mut st),
            Family::SymTriUl => self.two_sweeps(v1, v2, false, &mut st),
        };
        z[..self.n1].copy_from_slice(&z1);
        z[self.n1..].copy_from_slice(&z2);
        st
    }

    fn is_linear(&self) -> bool {
        self.spec.is_direct()
    }
}
