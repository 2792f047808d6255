//! The 2x2 block system `A = [A11 A12; A21 A22]`.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::dense::{concat, LuFactors, Matrix, Vector};
use crate::error::{Error, Result};
use crate::krylov::LinearOperator;

/// Which diagonal block a Schur complement (or its approximation) lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchurBlock {
    /// `S11 = A11 - A12 A22⁻¹ A21`
    #[serde(rename = "11")]
    S11,
    /// `S22 = A22 - A21 A11⁻¹ A12`
    #[serde(rename = "22")]
    S22,
}

impl SchurBlock {
    pub fn other(self) -> Self {
        match self {
            SchurBlock::S11 => SchurBlock::S22,
            SchurBlock::S22 => SchurBlock::S11,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SchurBlock::S11 => "11",
            SchurBlock::S22 => "22",
        }
    }
}

impl fmt::Display for SchurBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockOp {
    A11Inv,
    A22Inv,
    A11,
    A22,
    A12,
    A21,
}

/// A vector split conformally with a block system.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockVector {
    pub part1: Vector,
    pub part2: Vector,
}

impl BlockVector {
    pub fn new(part1: Vector, part2: Vector) -> Self {
        Self { part1, part2 }
    }

    pub fn split(v: &[f64], n1: usize) -> Self {
        Self {
            part1: v[..n1].to_vec(),
            part2: v[n1..].to_vec(),
        }
    }

    pub fn joined(&self) -> Vector {
        concat(&self.part1, &self.part2)
    }

    pub fn part(&self, block: SchurBlock) -> &Vector {
        match block {
            SchurBlock::S11 => &self.part1,
            SchurBlock::S22 => &self.part2,
        }
    }
}

pub struct BlockSystem2x2 {
    a11: Matrix,
    a12: Matrix,
    a21: Matrix,
    a22: Matrix,
    lu11: OnceLock<Result<LuFactors>>,
    lu22: OnceLock<Result<LuFactors>>,
}

impl Clone for BlockSystem2x2 {
    fn clone(&self) -> Self {
        Self {
            a11: self.a11.clone(),
            a12: self.a12.clone(),
            a21: self.a21.clone(),
            a22: self.a22.clone(),
            lu11: self.lu11.clone(),
            lu22: self.lu22.clone(),
        }
    }
}

impl fmt::Debug for BlockSystem2x2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BlockSystem2x2 {{ n1: {}, n2: {} }}", self.n1(), self.n2())
    }
}

impl BlockSystem2x2 {
    pub fn new(a11: Matrix, a12: Matrix, a21: Matrix, a22: Matrix) -> Result<Self> {
        let (n1, n2) = (a11.rows(), a22.rows());
        if !a11.is_square() || !a22.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "diagonal blocks must be square, got {}x{} and {}x{}",
                a11.rows(),
                a11.cols(),
                a22.rows(),
                a22.cols()
            )));
        }
        if a12.rows() != n1 || a12.cols() != n2 || a21.rows() != n2 || a21.cols() != n1 {
            return Err(Error::DimensionMismatch(format!(
                "off-diagonal blocks {}x{} and {}x{} do not fit n1={n1}, n2={n2}",
                a12.rows(),
                a12.cols(),
                a21.rows(),
                a21.cols()
            )));
        }
        if n1 == 0 || n2 == 0 {
            return Err(Error::DimensionMismatch("empty diagonal block".into()));
        }
        Ok(Self {
            a11,
            a12,
            a21,
            a22,
            lu11: OnceLock::new(),
            lu22: OnceLock::new(),
        })
    }

    pub fn from_monolithic(a: &Matrix, n1: usize) -> Result<Self> {
        if !a.is_square() || n1 == 0 || n1 >= a.rows() {
            return Err(Error::DimensionMismatch(format!(
                "cannot split a {}x{} matrix at n1={n1}",
                a.rows(),
                a.cols()
            )));
        }
        let n2 = a.rows() - n1;
        Self::new(
            a.submatrix(0, 0, n1, n1),
            a.submatrix(0, n1, n1, n2),
            a.submatrix(n1, 0, n2, n1),
            a.submatrix(n1, n1, n2, n2),
        )
    }

    pub fn n1(&self) -> usize {
        self.a11.rows()
    }

    pub fn n2(&self) -> usize {
        self.a22.rows()
    }

    pub fn dim(&self) -> usize {
        self.n1() + self.n2()
    }

    /// Size of the given diagonal block.
    pub fn block_dim(&self, block: SchurBlock) -> usize {
        match block {
            SchurBlock::S11 => self.n1(),
            SchurBlock::S22 => self.n2(),
        }
    }

    pub fn a11(&self) -> &Matrix {
        &self.a11
    }

    pub fn a12(&self) -> &Matrix {
        &self.a12
    }

    pub fn a21(&self) -> &Matrix {
        &self.a21
    }

    pub fn a22(&self) -> &Matrix {
        &self.a22
    }

    pub fn diag_block(&self, block: SchurBlock) -> &Matrix {
        match block {
            SchurBlock::S11 => &self.a11,
            SchurBlock::S22 => &self.a22,
        }
    }

    pub fn lu11(&self) -> Result<&LuFactors> {
        self.lu11
            .get_or_init(|| LuFactors::new(&self.a11))
            .as_ref()
            .map_err(|e| block_error("A11", e))
    }

    pub fn lu22(&self) -> Result<&LuFactors> {
        self.lu22
            .get_or_init(|| LuFactors::new(&self.a22))
            .as_ref()
            .map_err(|e| block_error("A22", e))
    }

    pub fn lu(&self, block: SchurBlock) -> Result<&LuFactors> {
        match block {
            SchurBlock::S11 => self.lu11(),
            SchurBlock::S22 => self.lu22(),
        }
    }

    pub fn assemble(&self) -> Matrix {
        Matrix::block2x2(&self.a11, &self.a12, &self.a21, &self.a22)
            .expect("blocks validated on construction")
    }

    pub fn schur_complement(&self, which: SchurBlock) -> Result<Matrix> {
        Ok(match which {
            SchurBlock::S11 => &self.a11 - &(&self.a12 * &self.lu22()?.solve_matrix(&self.a21)),
            SchurBlock::S22 => &self.a22 - &(&self.a21 * &self.lu11()?.solve_matrix(&self.a12)),
        })
    }

    pub fn apply_block(&self, op: BlockOp, v: &[f64]) -> Result<Vector> {
        let expected = match op {
            BlockOp::A11Inv | BlockOp::A11 | BlockOp::A21 => self.n1(),
            BlockOp::A22Inv | BlockOp::A22 | BlockOp::A12 => self.n2(),
        };
        if v.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "{op:?} expects a vector of length {expected}, got {}",
                v.len()
            )));
        }
        Ok(match op {
            BlockOp::A11Inv => self.lu11()?.solve(v),
            BlockOp::A22Inv => self.lu22()?.solve(v),
            BlockOp::A11 => self.a11.mul_vec(v),
            BlockOp::A22 => self.a22.mul_vec(v),
            BlockOp::A12 => self.a12.mul_vec(v),
            BlockOp::A21 => self.a21.mul_vec(v),
        })
    }

    /// `A11⁻¹ A12`
    pub fn a11_inv_a12(&self) -> Result<Matrix> {
        Ok(self.lu11()?.solve_matrix(&self.a12))
    }

    /// `A22⁻¹ A21`
    pub fn a22_inv_a21(&self) -> Result<Matrix> {
        Ok(self.lu22()?.solve_matrix(&self.a21))
    }

    /// `A21 A11⁻¹`
    pub fn a21_a11_inv(&self) -> Result<Matrix> {
        Ok(self.lu11()?.right_solve_matrix(&self.a21))
    }

    /// `A12 A22⁻¹`
    pub fn a12_a22_inv(&self) -> Result<Matrix> {
        Ok(self.lu22()?.right_solve_matrix(&self.a12))
    }

    /// Same off-diagonal coupling, different diagonal blocks.
    pub fn with_diagonal(&self, a11: Matrix, a22: Matrix) -> Result<Self> {
        Self::new(a11, self.a12.clone(), self.a21.clone(), a22)
    }

    pub fn is_saddle_point(&self) -> bool {
        self.a22.max_abs() == 0.0
    }
}

fn block_error(name: &str, e: &Error) -> Error {
    match e {
        Error::Singular { column, pivot } => Error::Precondition(format!(
            "{name} is singular (column {column}, pivot {pivot:e})"
        )),
        other => other.clone(),
    }
}

impl LinearOperator for BlockSystem2x2 {
    fn dim(&self) -> usize {
        BlockSystem2x2::dim(self)
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        let n1 = self.n1();
        let (x1, x2) = x.split_at(n1);
        let (y1, y2) = y.split_at_mut(n1);
        self.a11.mul_vec_into(x1, y1);
        let t = self.a12.mul_vec(x2);
        y1.iter_mut().zip(&t).for_each(|(a, b)| *a += b);
        self.a21.mul_vec_into(x1, y2);
        let t = self.a22.mul_vec(x2);
        y2.iter_mut().zip(&t).for_each(|(a, b)| *a += b);
    }
}
