use crate::error::{Error, Result};

use super::matrix::Matrix;
use super::vector::Vector;

/// Cholesky factor `A = L Lᵀ` of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: Matrix,
}

impl Cholesky {
    /// Fails with `NotSpd` if the matrix is visibly non-symmetric or a pivot
    /// is not positive.
    pub fn new(a: &Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "Cholesky needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let scale = a.max_abs().max(f64::MIN_POSITIVE);
        if a.asymmetry() > 1e-10 * scale {
            return Err(Error::NotSpd(format!(
                "asymmetry {:e} relative to max entry {:e}",
                a.asymmetry(),
                scale
            )));
        }
        let n = a.rows();
        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if d <= 1e-14 * scale {
                return Err(Error::NotSpd(format!("pivot {d:e} at column {j}")));
            }
            let d = d.sqrt();
            l[(j, j)] = d;
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(Self { l })
    }

    pub fn factor(&self) -> &Matrix {
        &self.l
    }

    pub fn solve(&self, b: &[f64]) -> Vector {
        let n = self.l.rows();
        assert_eq!(b.len(), n);
        let mut y = b.to_vec();
        for i in 0..n {
            let s: f64 = (0..i).map(|k| self.l[(i, k)] * y[k]).sum();
            y[i] = (y[i] - s) / self.l[(i, i)];
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| self.l[(k, i)] * y[k]).sum();
            y[i] = (y[i] - s) / self.l[(i, i)];
        }
        y
    }
}

pub fn is_spd(a: &Matrix) -> bool {
    Cholesky::new(a).is_ok()
}

/// `sqrt(vᵀ M v)` for a symmetric positive (semi)definite `M`.
pub fn energy_norm(m: &Matrix, v: &[f64]) -> f64 {
    super::vector::dot(v, &m.mul_vec(v)).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors_and_solves() {
        let a = Matrix::from_rows(&[&[4.0, 2.0], &[2.0, 3.0]]);
        let c = Cholesky::new(&a).unwrap();
        let l = c.factor();
        assert!((&(l * &l.transpose()) - &a).max_abs() < 1e-14);
        let x = c.solve(&[6.0, 5.0]);
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
        assert!((energy_norm(&a, &[1.0, 0.0]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_indefinite_and_nonsymmetric() {
        let indefinite = Matrix::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert!(matches!(Cholesky::new(&indefinite), Err(Error::NotSpd(_))));
        let nonsym = Matrix::from_rows(&[&[1.0, 0.5], &[0.0, 1.0]]);
        assert!(!is_spd(&nonsym));
    }
}
