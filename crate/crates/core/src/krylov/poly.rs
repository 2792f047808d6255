use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dense::{axpy, Matrix, Vector};
use crate::error::{Error, Result};

use super::operator::LinearOperator;

/// Coefficients `α₀..α_d` of `p(t) = Σ αᵢ tⁱ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialCoeffs {
    pub coeffs: Vec<f64>,
}

impl PolynomialCoeffs {
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a polynomial needs at least one coefficient");
        Self { coeffs }
    }

    /// A polynomial with `p(0) = 1`.
    pub fn consistent(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.first() != Some(&1.0) {
            return Err(Error::Precondition(format!(
                "consistent polynomial needs α₀ = 1, got {:?}",
                coeffs.first()
            )));
        }
        Ok(Self { coeffs })
    }

    /// Random consistent polynomial of exactly the given degree.
    pub fn random_consistent<R: Rng>(rng: &mut R, degree: usize) -> Self {
        let mut coeffs = vec![1.0];
        for _ in 0..degree {
            coeffs.push(StandardNormal.sample(rng));
        }
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_consistent(&self) -> bool {
        self.coeffs[0] == 1.0
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    /// `p(B)` as a dense matrix, by Horner's rule.
    pub fn eval_matrix(&self, b: &Matrix) -> Matrix {
        assert!(b.is_square());
        let n = b.rows();
        let mut acc = Matrix::zeros(n, n);
        for &c in self.coeffs.iter().rev() {
            acc = &acc * b;
            for i in 0..n {
                acc[(i, i)] += c;
            }
        }
        acc
    }

    /// `q(t) = p(t) (1 − t)`
    pub fn times_one_minus_t(&self) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[i] += c;
            out[i + 1] -= c;
        }
        Self { coeffs: out }
    }
}

/// Horner evaluation of `p(op) v`.
pub fn apply_consistent_polynomial(op: &dyn LinearOperator, p: &PolynomialCoeffs, v: &[f64]) -> Vector {
    let mut acc = vec![0.0; v.len()];
    for &c in p.coeffs.iter().rev() {
        acc = op.apply(&acc);
        axpy(c, v, &mut acc);
    }
    acc
}
