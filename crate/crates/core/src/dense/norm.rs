use super::matrix::Matrix;
use super::rng::seeded_rng;
use super::vector::{dot, norm2, scale_in_place};

use rand::Rng;

const POWER_RTOL: f64 = 1e-10;
const POWER_MAX_ITER: usize = 20_000;
const POWER_SEED: u64 = 0x5eed_0f_2a0a;

/// Spectral norm (largest singular value) by power iteration on the smaller
/// Gram matrix, started from a fixed pseudo-random vector.
pub fn two_norm(a: &Matrix) -> f64 {
    if a.rows() == 0 || a.cols() == 0 {
        return 0.0;
    }
    let scale = a.max_abs();
    if scale == 0.0 {
        return 0.0;
    }
    // work on a rescaled copy so the Gram products cannot overflow
    let a = a.scale(1.0 / scale);
    let wide = a.cols() > a.rows();
    let n = if wide { a.rows() } else { a.cols() };
    let gram_apply = |v: &[f64]| -> Vec<f64> {
        if wide {
            a.mul_vec(&a.tr_mul_vec(v))
        } else {
            a.tr_mul_vec(&a.mul_vec(v))
        }
    };

    let mut rng = seeded_rng(POWER_SEED);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0) + 0.1).collect();
    let nv = norm2(&v);
    scale_in_place(1.0 / nv, &mut v);

    let mut lambda = 0.0;
    for _ in 0..POWER_MAX_ITER {
        let w = gram_apply(&v);
        let new_lambda = dot(&v, &w);
        let nw = norm2(&w);
        if nw == 0.0 {
            // start vector landed in the null space; the matrix is nonzero so
            // retry from a unit vector hitting the largest column
            return fallback_unit_norm(&a) * scale;
        }
        let converged = (new_lambda - lambda).abs() <= POWER_RTOL * new_lambda.abs();
        lambda = new_lambda;
        v = w;
        scale_in_place(1.0 / nw, &mut v);
        if converged {
            break;
        }
    }
    lambda.max(0.0).sqrt() * scale
}

fn fallback_unit_norm(a: &Matrix) -> f64 {
    (0..a.cols())
        .map(|j| norm2(&a.column(j)))
        .fold(0.0, f64::max)
}
