use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::matrix::Matrix;
use super::vector::{norm2, Vector};

/// Seed used when neither the caller nor the environment supplies one.
pub const DEFAULT_SEED: u64 = 20_240_611;

pub type Rng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vector(rng: &mut Rng, n: usize) -> Vector {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

pub fn unit_vector(rng: &mut Rng, n: usize) -> Vector {
    loop {
        let mut v = gaussian_vector(rng, n);
        let nv = norm2(&v);
        if nv > 1e-12 {
            v.iter_mut().for_each(|x| *x /= nv);
            return v;
        }
    }
}

pub fn gaussian_matrix(rng: &mut Rng, rows: usize, cols: usize) -> Matrix {
    let data: Vec<f64> = (0..rows * cols).map(|_| StandardNormal.sample(rng)).collect();
    Matrix::from_row_major(rows, cols, data).expect("gaussian samples are finite")
}

/// Random orthogonal matrix from Gram–Schmidt on a Gaussian matrix.
pub fn random_orthogonal(rng: &mut Rng, n: usize) -> Matrix {
    loop {
        let g = gaussian_matrix(rng, n, n);
        let mut q: Vec<Vector> = Vec::with_capacity(n);
        let mut ok = true;
        for j in 0..n {
            let mut c = g.column(j);
            for _ in 0..2 {
                for b in &q {
                    let h = super::vector::dot(b, &c);
                    super::vector::axpy(-h, b, &mut c);
                }
            }
            let nc = norm2(&c);
            if nc < 1e-10 {
                ok = false;
                break;
            }
            c.iter_mut().for_each(|x| *x /= nc);
            q.push(c);
        }
        if ok {
            return Matrix::from_columns(&q);
        }
    }
}
