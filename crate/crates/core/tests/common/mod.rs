//! Reference computations kept independent of the library's own kernels.
#![allow(dead_code)]

use blockkrylov::dense::Matrix;
use blockkrylov::precond::Family;
use blockkrylov::{BlockSystem2x2, SchurBlock};

pub fn to_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

pub fn from_rows(a: &[Vec<f64>]) -> Matrix {
    let r: Vec<&[f64]> = a.iter().map(|v| v.as_slice()).collect();
    Matrix::from_rows(&r)
}

pub fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    let mut c = vec![vec![0.0; m]; n];
    for i in 0..n {
        for j in 0..m {
            let mut s = 0.0;
            for l in 0..k {
                s += a[i][l] * b[l][j];
            }
            c[i][j] = s;
        }
    }
    c
}

pub fn matvec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter().map(|r| r.iter().zip(x).map(|(u, v)| u * v).sum()).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Singular values by one-sided Jacobi rotations on the columns.
pub fn singular_values(a: &[Vec<f64>]) -> Vec<f64> {
    let (m, n) = (a.len(), a[0].len());
    // work on columns
    let mut u: Vec<Vec<f64>> = (0..n).map(|j| (0..m).map(|i| a[i][j]).collect()).collect();
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = u[p].iter().map(|x| x * x).sum();
                let beta: f64 = u[q].iter().map(|x| x * x).sum();
                let gamma: f64 = u[p].iter().zip(&u[q]).map(|(x, y)| x * y).sum();
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let (x, y) = (u[p][i], u[q][i]);
                    u[p][i] = c * x - s * y;
                    u[q][i] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut s: Vec<f64> = u.iter().map(|c| norm(c)).collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

pub fn spectral_norm(a: &[Vec<f64>]) -> f64 {
    singular_values(a)[0]
}

/// Gaussian elimination with partial pivoting; solves `A X = B` column-wise.
pub fn solve_many(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let m = b[0].len();
    let mut aug: Vec<Vec<f64>> = (0..n).map(|i| [a[i].clone(), b[i].clone()].concat()).collect();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| aug[i][k].abs().partial_cmp(&aug[j][k].abs()).unwrap()).unwrap();
        aug.swap(k, p);
        for i in k + 1..n {
            let f = aug[i][k] / aug[k][k];
            for j in k..n + m {
                aug[i][j] -= f * aug[k][j];
            }
        }
    }
    let mut x = vec![vec![0.0; m]; n];
    for c in 0..m {
        for i in (0..n).rev() {
            let mut s = aug[i][n + c];
            for j in i + 1..n {
                s -= aug[i][j] * x[j][c];
            }
            x[i][c] = s / aug[i][i];
        }
    }
    x
}

pub fn solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let col: Vec<Vec<f64>> = b.iter().map(|&v| vec![v]).collect();
    solve_many(a, &col).into_iter().map(|r| r[0]).collect()
}

/// `A22 − A21 A11⁻¹ A12` by eliminating the first `n1` unknowns of the
/// assembled matrix.
pub fn schur_by_elimination(a: &[Vec<f64>], n1: usize) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut w: Vec<Vec<f64>> = a.to_vec();
    for k in 0..n1 {
        for i in k + 1..n {
            let f = w[i][k] / w[k][k];
            for j in k..n {
                w[i][j] -= f * w[k][j];
            }
        }
    }
    (n1..n).map(|i| w[i][n1..].to_vec()).collect()
}

fn krylov_columns(t: &[Vec<f64>], r0: &[f64], d: usize) -> Vec<Vec<f64>> {
    // columns T r0, T² r0, … T^d r0, each normalized for conditioning
    let mut cols = Vec::new();
    let mut v = r0.to_vec();
    for _ in 0..d {
        v = matvec(t, &v);
        let s = norm(&v).max(f64::MIN_POSITIVE);
        v.iter_mut().for_each(|x| *x /= s);
        cols.push(v.clone());
    }
    cols
}

/// `min ‖r0 − K c‖` over `K = [T r0 … T^d r0]`, projecting on an
/// orthonormal basis built by Gram–Schmidt twice.
pub fn krylov_min_residual(t: &[Vec<f64>], r0: &[f64], d: usize) -> f64 {
    let cols = krylov_columns(t, r0, d);
    let mut q: Vec<Vec<f64>> = Vec::new();
    for mut c in cols {
        for _ in 0..2 {
            for qi in &q {
                let h: f64 = qi.iter().zip(&c).map(|(a, b)| a * b).sum();
                c.iter_mut().zip(qi).for_each(|(x, y)| *x -= h * y);
            }
        }
        let s = norm(&c);
        if s > 1e-13 {
            q.push(c.into_iter().map(|x| x / s).collect());
        }
    }
    let mut r = r0.to_vec();
    for _ in 0..2 {
        for qi in &q {
            let h: f64 = qi.iter().zip(&r).map(|(a, b)| a * b).sum();
            r.iter_mut().zip(qi).for_each(|(x, y)| *x -= h * y);
        }
    }
    norm(&r)
}

/// `min ‖e0 − K c‖_A` over `K = [T e0 … T^d e0]` for SPD `A`, by
/// A-orthogonal projection (Gram–Schmidt twice in the A inner product).
pub fn energy_min_error(a: &[Vec<f64>], t: &[Vec<f64>], e0: &[f64], d: usize) -> f64 {
    let a_dot = |x: &[f64], y: &[f64]| dot(x, &matvec(a, y));
    let mut q: Vec<Vec<f64>> = Vec::new();
    for mut c in krylov_columns(t, e0, d) {
        for _ in 0..2 {
            for qi in &q {
                let h = a_dot(qi, &c);
                c.iter_mut().zip(qi).for_each(|(x, y)| *x -= h * y);
            }
        }
        let s = a_dot(&c, &c).max(0.0).sqrt();
        if s > 1e-13 {
            q.push(c.into_iter().map(|x| x / s).collect());
        }
    }
    let mut e = e0.to_vec();
    for _ in 0..2 {
        for qi in &q {
            let h = a_dot(qi, &e);
            e.iter_mut().zip(qi).for_each(|(x, y)| *x -= h * y);
        }
    }
    a_dot(&e, &e).max(0.0).sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `p(T) v` for `p(t) = Σ c_k t^k`, by Horner on vectors.
pub fn poly_apply(t: &[Vec<f64>], coeffs: &[f64], v: &[f64]) -> Vec<f64> {
    let mut acc = vec![0.0; v.len()];
    for &c in coeffs.iter().rev() {
        acc = matvec(t, &acc);
        acc.iter_mut().zip(v).for_each(|(a, x)| *a += c * x);
    }
    acc
}

pub fn max_abs_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(u, v)| (u - v).abs()))
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &[Vec<f64>]) -> f64 {
    a.iter().flatten().fold(0.0_f64, |m, x| m.max(x.abs()))
}

pub type Rows = Vec<Vec<f64>>;

pub fn blocks(sys: &BlockSystem2x2) -> (Rows, Rows, Rows, Rows) {
    (
        to_rows(sys.a11()),
        to_rows(sys.a12()),
        to_rows(sys.a21()),
        to_rows(sys.a22()),
    )
}

pub fn stack(a: &Rows, b: &Rows, c: &Rows, d: &Rows) -> Rows {
    let mut out: Rows = a.iter().zip(b).map(|(x, y)| [x.clone(), y.clone()].concat()).collect();
    out.extend(c.iter().zip(d).map(|(x, y)| [x.clone(), y.clone()].concat()));
    out
}

pub fn zeros(r: usize, c: usize) -> Rows {
    vec![vec![0.0; c]; r]
}

pub fn identity(n: usize) -> Rows {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

pub fn add(a: &Rows, b: &Rows) -> Rows {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(u, v)| u + v).collect()).collect()
}

/// The preconditioning matrix `P` written out from its block definition.
pub fn assembled(sys: &BlockSystem2x2, family: Family, block: SchurBlock, shat: &Rows) -> Rows {
    let (a11, a12, a21, a22) = blocks(sys);
    let (n1, n2) = (sys.n1(), sys.n2());
    // diagonal blocks after substituting Ŝ
    let (d1, d2) = match block {
        SchurBlock::S22 => (a11.clone(), shat.clone()),
        SchurBlock::S11 => (shat.clone(), a22.clone()),
    };
    match family {
        Family::BlockDiagonal => stack(&d1, &zeros(n1, n2), &zeros(n2, n1), &d2),
        Family::LowerTriangular => stack(&d1, &zeros(n1, n2), &a21, &d2),
        Family::UpperTriangular => stack(&d1, &a12, &zeros(n2, n1), &d2),
        Family::BlockLdu => match block {
            SchurBlock::S22 => {
                let a11_inv_a12 = solve_many(&a11, &a12);
                stack(&a11, &a12, &a21, &add(shat, &matmul(&a21, &a11_inv_a12)))
            }
            SchurBlock::S11 => {
                let a22_inv_a21 = solve_many(&a22, &a21);
                stack(&add(shat, &matmul(&a12, &a22_inv_a21)), &a12, &a21, &a22)
            }
        },
        Family::SymTriLu | Family::SymTriUl => unreachable!("defined through the sweeps"),
    }
}


pub fn inverse(a: &Rows) -> Rows {
    solve_many(a, &identity(a.len()))
}

/// `I − P⁻¹A` (left) or `I − AP⁻¹` (right).
pub fn propagator(a: &Rows, p: &Rows, left: bool) -> Rows {
    let p_inv = inverse(p);
    let prod = if left { matmul(&p_inv, a) } else { matmul(a, &p_inv) };
    let neg: Rows = prod.iter().map(|r| r.iter().map(|v| -v).collect()).collect();
    add(&identity(a.len()), &neg)
}

pub fn power(a: &Rows, k: usize) -> Rows {
    (0..k).fold(identity(a.len()), |acc, _| matmul(&acc, a))
}
