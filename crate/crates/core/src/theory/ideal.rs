//! Estimates of ideal GMRES norms `min_p ‖p(B)‖₂` over consistent `p` of a
//! given degree.
//!
//! Two estimates bracket the true value: the worst minimal residual over
//! random unit start vectors is a lower estimate, and `σ_max(p(B))` for the
//! best polynomial found by local minimization is an upper estimate.

use serde::{Deserialize, Serialize};

use crate::dense::rng::{gaussian_vector, seeded_rng, unit_vector, Rng, DEFAULT_SEED};
use crate::dense::{symmetric_eigen, LuFactors, Matrix};
use crate::error::{Error, Result};
use crate::krylov::{minimal_residuals, PolynomialCoeffs};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdealOptions {
    /// Random unit start vectors for the sampled estimate.
    pub samples: usize,
    /// Local minimizations, the first from the Frobenius-optimal polynomial.
    pub starts: usize,
    pub seed: u64,
}

impl Default for IdealOptions {
    fn default() -> Self {
        Self {
            samples: 200,
            starts: 3,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdealNormEstimate {
    pub degree: usize,
    /// `max_r min_p ‖p(B) r‖` over the sampled unit vectors.
    pub sampled: f64,
    /// `‖p*(B)‖₂` for the minimizing polynomial found.
    pub minimized: f64,
    pub polynomial: PolynomialCoeffs,
}

impl IdealNormEstimate {
    /// The estimate used in bound checks.
    pub fn value(&self) -> f64 {
        self.minimized
    }
}

pub fn ideal_norm(b: &Matrix, degree: usize, opts: &IdealOptions) -> Result<IdealNormEstimate> {
    if !b.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "ideal norm needs a square matrix, got {}x{}",
            b.rows(),
            b.cols()
        )));
    }
    let mut rng = seeded_rng(opts.seed ^ (degree as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let sampled = sampled_ideal_norm(b, degree, opts.samples, &mut rng)?;
    let (minimized, polynomial) = minimized_ideal_norm(b, degree, opts.starts.max(1), &mut rng)?;
    Ok(IdealNormEstimate {
        degree,
        sampled,
        minimized,
        polynomial,
    })
}

pub fn sampled_ideal_norm(b: &Matrix, degree: usize, samples: usize, rng: &mut Rng) -> Result<f64> {
    if degree == 0 {
        return Ok(1.0);
    }
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let r = unit_vector(rng, b.rows());
        worst = worst.max(minimal_residuals(b, &r, degree)?.norm(degree));
    }
    Ok(worst)
}

/// `σ_max(p(B))`
pub fn polynomial_norm(b: &Matrix, p: &PolynomialCoeffs) -> f64 {
    spectral_norm(&p.eval_matrix(b))
}

fn spectral_norm(x: &Matrix) -> f64 {
    let g = &x.transpose() * x;
    symmetric_eigen(&g).0.first().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// `I + Σ cᵢ Pᵢ` with `Pᵢ = Bⁱ / ‖Bⁱ‖_F`.
struct Objective {
    basis: Vec<Matrix>,
    scales: Vec<f64>,
    n: usize,
}

impl Objective {
    fn new(b: &Matrix, degree: usize) -> Self {
        let n = b.rows();
        let mut basis = Vec::with_capacity(degree);
        let mut scales = Vec::with_capacity(degree);
        let mut power = Matrix::identity(n);
        for _ in 0..degree {
            power = &power * b;
            let s = power.frobenius_norm();
            let s = if s > 0.0 { s } else { 1.0 };
            basis.push(power.scale(1.0 / s));
            scales.push(s);
        }
        Self { basis, scales, n }
    }

    fn matrix(&self, c: &[f64]) -> Matrix {
        let mut data = Matrix::identity(self.n).into_vec();
        for (ci, p) in c.iter().zip(&self.basis) {
            data.iter_mut().zip(p.as_slice()).for_each(|(x, b)| *x += ci * b);
        }
        Matrix::from_row_major(self.n, self.n, data).expect("finite coefficients")
    }

    fn sigma_max(&self, c: &[f64]) -> f64 {
        spectral_norm(&self.matrix(c))
    }

    /// Schatten-`q` norm of `X(c)` and its gradient.
    fn schatten(&self, c: &[f64], q: f64) -> (f64, Vec<f64>) {
        let x = self.matrix(c);
        let (lambda, v) = symmetric_eigen(&(&x.transpose() * &x));
        let lmax = lambda.first().copied().unwrap_or(0.0);
        if !(lmax > 1e-300) {
            return (0.0, vec![0.0; c.len()]);
        }
        let mu: Vec<f64> = lambda.iter().map(|l| l.max(0.0) / lmax).collect();
        let sum: f64 = mu.iter().map(|m| m.powf(q / 2.0)).sum();
        let g = sum.powf(1.0 / q);
        let f = lmax.sqrt() * g;
        let w: Vec<f64> = mu
            .iter()
            .map(|&m| if q == 2.0 { 1.0 } else { m.powf(q / 2.0 - 1.0) })
            .collect();
        // V diag(w) Vᵀ Xᵀ
        let vw = Matrix::from_fn(self.n, self.n, |i, j| v[(i, j)] * w[j]);
        let m = &(&vw * &v.transpose()) * &x.transpose();
        let factor = g.powf(1.0 - q) / lmax.sqrt();
        let grad = self
            .basis
            .iter()
            .map(|p| {
                let mut tr = 0.0;
                for j in 0..self.n {
                    for k in 0..self.n {
                        tr += m[(j, k)] * p[(k, j)];
                    }
                }
                factor * tr
            })
            .collect();
        (f, grad)
    }

    /// Minimizer of `‖X(c)‖_F`, a linear least-squares problem.
    fn frobenius_start(&self) -> Vec<f64> {
        let d = self.basis.len();
        let inner = |a: &Matrix, b: &Matrix| a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x * y).sum::<f64>();
        let mut gram = Matrix::from_fn(d, d, |i, j| inner(&self.basis[i], &self.basis[j]));
        let ridge = 1e-13 * (0..d).map(|i| gram[(i, i)]).fold(0.0, f64::max).max(1e-300);
        for i in 0..d {
            gram[(i, i)] += ridge;
        }
        let rhs: Vec<f64> = self.basis.iter().map(|p| -p.diagonal().iter().sum::<f64>()).collect();
        match LuFactors::new(&gram) {
            Ok(lu) => lu.solve(&rhs),
            Err(_) => vec![0.0; d],
        }
    }

    fn polynomial(&self, c: &[f64]) -> PolynomialCoeffs {
        let mut coeffs = vec![1.0];
        coeffs.extend(c.iter().zip(&self.scales).map(|(ci, s)| ci / s));
        PolynomialCoeffs { coeffs }
    }
}

pub fn minimized_ideal_norm(b: &Matrix, degree: usize, starts: usize, rng: &mut Rng) -> Result<(f64, PolynomialCoeffs)> {
    if degree == 0 {
        return Ok((1.0, PolynomialCoeffs { coeffs: vec![1.0] }));
    }
    let obj = Objective::new(b, degree);
    let base = obj.frobenius_start();
    let mut best_c = base.clone();
    let mut best = obj.sigma_max(&base);
    if best <= 1e-13 {
        // the Frobenius minimizer already annihilates B (degree at least the
        // degree of its minimal polynomial)
        return Ok((best, obj.polynomial(&base)));
    }
    for s in 0..starts {
        let mut c = base.clone();
        if s > 0 {
            let kick = gaussian_vector(rng, degree);
            c.iter_mut().zip(kick).for_each(|(ci, k)| *ci += 0.5 * k * (1.0 + ci.abs()));
        }
        let mut q = 4.0;
        while q <= 1024.0 {
            c = bfgs(|x| obj.schatten(x, q), c, 100);
            q *= 4.0;
        }
        c = nelder_mead(|x| obj.sigma_max(x), c, 200 * degree);
        let value = obj.sigma_max(&c);
        if value < best {
            best = value;
            best_c = c;
        }
    }
    let p = obj.polynomial(&best_c);
    Ok((best, p))
}

fn bfgs(f: impl Fn(&[f64]) -> (f64, Vec<f64>), x0: Vec<f64>, max_iter: usize) -> Vec<f64> {
    let n = x0.len();
    let mut x = x0;
    let (mut fx, mut g) = f(&x);
    let mut h = Matrix::identity(n);
    for _ in 0..max_iter {
        let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gnorm <= 1e-13 * fx.max(1e-300) || fx == 0.0 {
            break;
        }
        let mut p: Vec<f64> = h.mul_vec(&g).iter().map(|v| -v).collect();
        let mut slope: f64 = p.iter().zip(&g).map(|(a, b)| a * b).sum();
        if slope >= 0.0 {
            h = Matrix::identity(n);
            p = g.iter().map(|v| -v).collect();
            slope = -gnorm * gnorm;
        }
        let mut t = 1.0;
        let (x_new, f_new, g_new) = loop {
            let trial: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + t * b).collect();
            let (ft, gt) = f(&trial);
            if ft <= fx + 1e-4 * t * slope {
                break (trial, ft, gt);
            }
            t *= 0.5;
            if t < 1e-14 {
                return x;
            }
        };
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        let done = (fx - f_new).abs() <= 1e-15 * fx;
        if sy > 1e-300 {
            let rho = 1.0 / sy;
            let hy = h.mul_vec(&y);
            let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
            // H ← H − ρ(s·hyᵀ + hy·sᵀ) + (ρ²·yᵀHy + ρ) s sᵀ
            for i in 0..n {
                for j in 0..n {
                    h[(i, j)] += -rho * (s[i] * hy[j] + hy[i] * s[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
        }
        x = x_new;
        fx = f_new;
        g = g_new;
        if done {
            break;
        }
    }
    x
}

fn nelder_mead(f: impl Fn(&[f64]) -> f64, x0: Vec<f64>, max_iter: usize) -> Vec<f64> {
    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = f(&x0);
    simplex.push((x0.clone(), f0));
    for i in 0..n {
        let mut x = x0.clone();
        x[i] += 1e-3 * (1.0 + x[i].abs());
        let fx = f(&x);
        simplex.push((x, fx));
    }
    let combine = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect() };
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (lo, hi) = (simplex[0].1, simplex[n].1);
        if hi - lo <= 1e-12 * lo.abs().max(1e-300) {
            break;
        }
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            centroid.iter_mut().zip(x).for_each(|(c, v)| *c += v / n as f64);
        }
        let worst = simplex[n].0.clone();
        let reflected = combine(&centroid, &worst, -1.0);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = combine(&centroid, &worst, -2.0);
            let fe = f(&expanded);
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
        } else {
            let contracted = if fr < simplex[n].1 {
                combine(&centroid, &reflected, 0.5)
            } else {
                combine(&centroid, &worst, 0.5)
            };
            let fc = f(&contracted);
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (contracted, fc);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let x = combine(&best, &entry.0, 0.5);
                    let fx = f(&x);
                    *entry = (x, fx);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::rng::gaussian_matrix;

    #[test]
    fn normal_matrix_ideal_norm_is_the_polynomial_minimax() {
        // B = diag(1, 2): the best linear consistent p is 1 − 2t/3 with norm 1/3.
        let b = Matrix::from_diag(&[1.0, 2.0]);
        let est = ideal_norm(&b, 1, &IdealOptions::default()).unwrap();
        assert!((est.minimized - 1.0 / 3.0).abs() < 1e-6, "{}", est.minimized);
        assert!(est.sampled <= est.minimized + 1e-12);
        assert!((polynomial_norm(&b, &est.polynomial) - est.minimized).abs() < 1e-12);
    }

    #[test]
    fn identity_is_killed_by_degree_one() {
        let est = ideal_norm(&Matrix::identity(5), 1, &IdealOptions::default()).unwrap();
        assert!(est.minimized < 1e-12 && est.sampled < 1e-12);
    }

    #[test]
    fn degree_zero_is_one() {
        let est = ideal_norm(&Matrix::identity(3), 0, &IdealOptions::default()).unwrap();
        assert_eq!(est.minimized, 1.0);
    }

    #[test]
    fn sampled_estimate_never_exceeds_minimized() {
        let mut rng = seeded_rng(3);
        let b = &gaussian_matrix(&mut rng, 8, 8).scale(0.3) + &Matrix::identity(8).scale(2.0);
        for d in 1..=4 {
            let est = ideal_norm(&b, d, &IdealOptions { samples: 50, ..Default::default() }).unwrap();
            assert!(est.sampled <= est.minimized * (1.0 + 1e-10), "d={d}: {est:?}");
        }
    }
}
