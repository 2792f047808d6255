use crate::error::{Error, Result};

use super::matrix::Matrix;
use super::vector::Vector;

/// Relative pivot threshold below which a matrix is reported singular.
pub const SINGULAR_RTOL: f64 = 1e-14;

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct LuFactors {
    n: usize,
    lu: Matrix,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn new(a: &Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "LU needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        if !a.is_finite() {
            return Err(Error::NonFinite("matrix passed to LU".into()));
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let threshold = SINGULAR_RTOL * a.max_abs();
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot <= threshold || pivot == 0.0 {
                return Err(Error::Singular { column: k, pivot });
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
            }
            let d = lu[(k, k)];
            for i in k + 1..n {
                let l = lu[(i, k)] / d;
                lu[(i, k)] = l;
                if l != 0.0 {
                    for j in k + 1..n {
                        lu[(i, j)] -= l * lu[(k, j)];
                    }
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Vector {
        let mut x = vec![0.0; self.n];
        self.solve_into(b, &mut x);
        x
    }

    pub fn solve_into(&self, b: &[f64], x: &mut [f64]) {
        assert_eq!(b.len(), self.n, "rhs length does not match factorization");
        let n = self.n;
        for i in 0..n {
            x[i] = b[self.perm[i]];
        }
        for i in 0..n {
            let row = self.lu.row(i);
            let s: f64 = (0..i).map(|j| row[j] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: f64 = (i + 1..n).map(|j| row[j] * x[j]).sum();
            x[i] = (x[i] - s) / row[i];
        }
    }

    /// Solves `Aᵀ x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Vector {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut y = b.to_vec();
        // Uᵀ w = b
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[(j, i)] * y[j]).sum();
            y[i] = (y[i] - s) / self.lu[(i, i)];
        }
        // Lᵀ z = w
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[(j, i)] * y[j]).sum();
            y[i] -= s;
        }
        let mut x = vec![0.0; n];
        for i in 0..n {
            x[self.perm[i]] = y[i];
        }
        x
    }

    /// `A⁻¹ B`, column by column.
    pub fn solve_matrix(&self, b: &Matrix) -> Matrix {
        assert_eq!(b.rows(), self.n);
        let mut out = Matrix::zeros(b.rows(), b.cols());
        let mut x = vec![0.0; self.n];
        for j in 0..b.cols() {
            self.solve_into(&b.column(j), &mut x);
            out.set_column(j, &x);
        }
        out
    }

    /// `B A⁻¹`
    pub fn right_solve_matrix(&self, b: &Matrix) -> Matrix {
        assert_eq!(b.cols(), self.n);
        let mut out = Matrix::zeros(b.rows(), b.cols());
        for i in 0..b.rows() {
            let x = self.solve_transpose(b.row(i));
            out.row_mut(i).copy_from_slice(&x);
        }
        out
    }

    pub fn inverse(&self) -> Matrix {
        self.solve_matrix(&Matrix::identity(self.n))
    }

    pub fn determinant(&self) -> f64 {
        let mut det: f64 = (0..self.n).map(|i| self.lu[(i, i)]).product();
        // parity of the permutation
        let mut seen = vec![false; self.n];
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                j = self.perm[j];
                len += 1;
            }
            if len % 2 == 0 {
                det = -det;
            }
        }
        det
    }
}

pub fn inverse(a: &Matrix) -> Result<Matrix> {
    Ok(LuFactors::new(a)?.inverse())
}

pub fn solve(a: &Matrix, b: &[f64]) -> Result<Vector> {
    Ok(LuFactors::new(a)?.solve(b))
}
