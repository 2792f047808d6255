//! Arnoldi process with Givens-rotated Hessenberg least squares.

use crate::dense::{axpy, dot, norm2, Vector};

/// Loss-of-orthogonality level that triggers a second Gram–Schmidt pass.
const REORTH_TOL: f64 = 1e-8;
/// `h[k+1,k]` below this fraction of `‖T v_k‖` counts as an invariant subspace.
const BREAKDOWN_TOL: f64 = 1e-14;

pub(crate) struct Arnoldi {
    beta: f64,
    basis: Vec<Vector>,
    /// Unrotated Hessenberg columns; column `j` has `j + 2` entries.
    hcols: Vec<Vec<f64>>,
    /// Rotated (upper triangular) columns; column `j` has `j + 1` entries.
    rcols: Vec<Vec<f64>>,
    rotations: Vec<(f64, f64)>,
    g: Vec<f64>,
    breakdown: bool,
}

impl Arnoldi {
    pub(crate) fn new(r0: &[f64]) -> Self {
        let beta = norm2(r0);
        let mut basis = Vec::new();
        if beta > 0.0 {
            basis.push(r0.iter().map(|v| v / beta).collect());
        }
        Self {
            beta,
            basis,
            hcols: Vec::new(),
            rcols: Vec::new(),
            rotations: Vec::new(),
            g: vec![beta],
            breakdown: beta == 0.0,
        }
    }

    pub(crate) fn steps(&self) -> usize {
        self.hcols.len()
    }

    pub(crate) fn broke_down(&self) -> bool {
        self.breakdown
    }

    /// The basis vector the next step expands from.
    pub(crate) fn current(&self) -> &[f64] {
        &self.basis[self.steps()]
    }

    /// Least-squares residual norm after the steps taken so far.
    pub(crate) fn residual_estimate(&self) -> f64 {
        self.g[self.steps()].abs()
    }

    /// Consumes `w = T v_k` and returns the new residual estimate.
    pub(crate) fn step(&mut self, mut w: Vector) -> f64 {
        assert!(!self.breakdown, "Arnoldi step after breakdown");
        let k = self.steps();
        let wnorm0 = norm2(&w);
        let mut h = vec![0.0; k + 2];
        for (i, v) in self.basis.iter().enumerate() {
            let hi = dot(v, &w);
            axpy(-hi, v, &mut w);
            h[i] = hi;
        }
        let wnorm = norm2(&w);
        let coeffs: Vec<f64> = self.basis.iter().map(|v| dot(v, &w)).collect();
        let worst = coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        if wnorm > 0.0 && worst > REORTH_TOL * wnorm {
            for (i, (v, c)) in self.basis.iter().zip(&coeffs).enumerate() {
                axpy(-c, v, &mut w);
                h[i] += c;
            }
        }
        let hnext = norm2(&w);
        h[k + 1] = hnext;
        if hnext <= BREAKDOWN_TOL * wnorm0 || hnext == 0.0 {
            self.breakdown = true;
        } else {
            w.iter_mut().for_each(|x| *x /= hnext);
            self.basis.push(w);
        }

        let mut r = h.clone();
        for (i, &(c, s)) in self.rotations.iter().enumerate() {
            let (a, b) = (r[i], r[i + 1]);
            r[i] = c * a + s * b;
            r[i + 1] = -s * a + c * b;
        }
        let (a, b) = (r[k], r[k + 1]);
        let denom = a.hypot(b);
        let (c, s) = if denom == 0.0 { (1.0, 0.0) } else { (a / denom, b / denom) };
        r[k] = denom;
        r.truncate(k + 1);
        self.rotations.push((c, s));
        let gk = self.g[k];
        self.g[k] = c * gk;
        self.g.push(-s * gk);
        self.hcols.push(h);
        self.rcols.push(r);
        self.residual_estimate()
    }

    /// Least-squares coefficients for the first `d` steps, or `None` if the
    /// triangular factor is singular.
    pub(crate) fn solve(&self, d: usize) -> Option<Vector> {
        assert!(d <= self.steps());
        let mut y = self.g[..d].to_vec();
        for i in (0..d).rev() {
            let mut s = y[i];
            for j in i + 1..d {
                s -= self.rcols[j][i] * y[j];
            }
            let diag = self.rcols[i][i];
            if diag == 0.0 || !diag.is_finite() {
                return None;
            }
            y[i] = s / diag;
        }
        Some(y)
    }

    /// `V_d y`
    pub(crate) fn combine(&self, y: &[f64]) -> Vector {
        let n = self.basis.first().map_or(0, |v| v.len());
        let mut out = vec![0.0; n];
        for (v, &c) in self.basis.iter().zip(y) {
            axpy(c, v, &mut out);
        }
        out
    }

    /// Minimal residual vector after `d` steps: `V_{d+1} (β e₁ − H_d y_d)`.
    pub(crate) fn residual_vector(&self, d: usize, n: usize) -> Option<Vector> {
        if self.beta == 0.0 {
            return Some(vec![0.0; n]);
        }
        let y = self.solve(d)?;
        let mut coeffs = vec![0.0; d + 1];
        coeffs[0] = self.beta;
        for (j, yj) in y.iter().enumerate() {
            for (i, hij) in self.hcols[j].iter().enumerate() {
                coeffs[i] -= hij * yj;
            }
        }
        let mut out = vec![0.0; n];
        for (v, c) in self.basis.iter().zip(&coeffs) {
            axpy(*c, v, &mut out);
        }
        Some(out)
    }
}
