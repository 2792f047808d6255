use std::fmt;
use std::str::FromStr;

use crate::block::{BlockSystem2x2, SchurBlock};
use crate::dense::rng::{gaussian_matrix, gaussian_vector, random_orthogonal, seeded_rng};
use crate::dense::{inverse, unit, Matrix, Vector};
use crate::error::{Error, Result};

/// Size of each half of the identity-plus-tridiagonal pair.
const EXAMPLE11_HALF: usize = 500;

/// `[I, 0; 0, tridiag(−1, center, −1)]` with `b = (1, 2, …, 1000)ᵀ / 1000`.
pub fn example11(center: f64) -> Result<(BlockSystem2x2, Vector)> {
    let n = EXAMPLE11_HALF;
    let d = Matrix::from_fn(n, n, |i, j| {
        if i == j {
            center
        } else if i.abs_diff(j) == 1 {
            -1.0
        } else {
            0.0
        }
    });
    let sys = BlockSystem2x2::new(Matrix::identity(n), Matrix::zeros(n, n), Matrix::zeros(n, n), d)?;
    let b = (1..=2 * n).map(|i| i as f64 / (2 * n) as f64).collect();
    Ok((sys, b))
}

/// Coordinates in which the nilpotent part is written.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NilpotentBasis {
    /// `N = Z`, the plain shift `Z e_i = e_{i+bw}`.
    Shift,
    /// `N = V Z V⁻¹` with `V` chosen so that `⟨e₁, Nʲ e₁⟩ = 1` along the
    /// whole Krylov chain, which makes GMRES stagnate until the chain ends.
    Stagnating,
}

impl fmt::Display for NilpotentBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NilpotentBasis::Shift => "shift",
            NilpotentBasis::Stagnating => "stagnating",
        })
    }
}

impl FromStr for NilpotentBasis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "shift" | "plain" => Ok(NilpotentBasis::Shift),
            "stagnating" | "stall" => Ok(NilpotentBasis::Stagnating),
            _ => Err(Error::Parse(format!("unknown nilpotent basis {s:?}"))),
        }
    }
}

/// `A = I − N` with `N` nilpotent, and `b = e₁`.
///
/// In the stagnating basis `Nʲ e₁ = e₁ + e_{1+j·bw}` while that index exists,
/// so the degree-`j` GMRES residual is `1 + Σ q_i²` at best: the residual
/// stays at `‖b‖` until the chain has length `⌊(n−2)/bw⌋ + 1`, where it drops
/// to zero.
pub fn nilpotent(n: usize, bandwidth: usize, basis: NilpotentBasis) -> Result<(Matrix, Vector)> {
    if n < 3 || bandwidth == 0 || bandwidth >= n {
        return Err(Error::InvalidConfig(format!(
            "nilpotent problem needs n >= 3 and 1 <= bw < n, got n={n}, bw={bandwidth}"
        )));
    }
    let z = Matrix::from_fn(n, n, |i, j| if i == j + bandwidth { 1.0 } else { 0.0 });
    let nil = match basis {
        NilpotentBasis::Shift => z,
        NilpotentBasis::Stagnating => {
            let v = Matrix::from_fn(n, n, |i, j| match j {
                0 => (i == n - 1) as u8 as f64,
                1 => (i == 0) as u8 as f64,
                _ => (i == 0 || i == j - 1) as u8 as f64,
            });
            let vinv = inverse(&v)?;
            &(&v * &z) * &vinv
        }
    };
    Ok((&Matrix::identity(n) - &nil, unit(n, 0)))
}

/// Diagonal blocks `2·U diag(σ) Wᵀ` with `σ` geometric from 1 down to
/// `1/conditioning`, Gaussian coupling of norm about 0.6.
pub fn random_block(n1: usize, n2: usize, seed: u64, conditioning: f64) -> Result<(BlockSystem2x2, Vector)> {
    let mut rng = seeded_rng(seed);
    let mut diag_block = |n: usize| {
        let u = random_orthogonal(&mut rng, n);
        let w = random_orthogonal(&mut rng, n);
        let sigma: Vec<f64> = (0..n)
            .map(|i| {
                let t = if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 };
                2.0 * conditioning.powf(-t)
            })
            .collect();
        &(&u * &Matrix::from_diag(&sigma)) * &w.transpose()
    };
    let a11 = diag_block(n1);
    let a22 = diag_block(n2);
    let c = 0.3 / ((n1 + n2) as f64).sqrt();
    let a12 = gaussian_matrix(&mut rng, n1, n2).scale(c);
    let a21 = gaussian_matrix(&mut rng, n2, n1).scale(c);
    let b = gaussian_vector(&mut rng, n1 + n2);
    Ok((BlockSystem2x2::new(a11, a12, a21, a22)?, b))
}

/// `[A, Bᵀ; B, 0]` with `A` SPD and `B` of full row rank (`n2 ≤ n1`).
pub fn saddle_point(n1: usize, n2: usize, seed: u64) -> Result<(BlockSystem2x2, Vector)> {
    if n2 > n1 {
        return Err(Error::InvalidConfig(format!(
            "saddle point needs n2 <= n1, got {n1} and {n2}"
        )));
    }
    let mut rng = seeded_rng(seed);
    let g = gaussian_matrix(&mut rng, n1, n1);
    let a11 = &(&g.transpose() * &g).scale(1.0 / n1 as f64) + &Matrix::identity(n1);
    let a12 = gaussian_matrix(&mut rng, n1, n2).scale(1.0 / (n1 as f64).sqrt());
    let a21 = a12.transpose();
    let b = gaussian_vector(&mut rng, n1 + n2);
    Ok((BlockSystem2x2::new(a11, a12, a21, Matrix::zeros(n2, n2))?, b))
}

/// `GᵀG/n + I` split after `n1` rows.
pub fn spd_block(n1: usize, n2: usize, seed: u64) -> Result<(BlockSystem2x2, Vector)> {
    let mut rng = seeded_rng(seed);
    let n = n1 + n2;
    let g = gaussian_matrix(&mut rng, n, n);
    let mut a = &(&g.transpose() * &g).scale(1.0 / n as f64) + &Matrix::identity(n);
    // symmetrize exactly so that rounding in the product leaves no skew part
    for i in 0..n {
        for j in 0..i {
            let m = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = m;
            a[(j, i)] = m;
        }
    }
    let b = gaussian_vector(&mut rng, n);
    Ok((BlockSystem2x2::from_monolithic(&a, n1)?, b))
}

/// `S_kk + δ·max|S_kk|·G/√n` with a seeded Gaussian `G`.
pub fn perturbed_schur(sys: &BlockSystem2x2, block: SchurBlock, delta: f64, seed: u64) -> Result<Matrix> {
    let s = sys.schur_complement(block)?;
    let n = s.rows();
    let mut rng = seeded_rng(seed);
    let g = gaussian_matrix(&mut rng, n, n);
    Ok(&s + &g.scale(delta * s.max_abs() / (n as f64).sqrt()))
}
