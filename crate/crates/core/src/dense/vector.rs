use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vector = Vec<f64>;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    // scaled accumulation avoids overflow for very large entries
    let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let s: f64 = a.iter().map(|v| (v / scale) * (v / scale)).sum();
    scale * s.sqrt()
}

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scale_in_place(alpha: f64, x: &mut [f64]) {
    for v in x {
        *v *= alpha;
    }
}

pub fn sub(a: &[f64], b: &[f64]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn concat(a: &[f64], b: &[f64]) -> Vector {
    let mut v = Vec::with_capacity(a.len() + b.len());
    v.extend_from_slice(a);
    v.extend_from_slice(b);
    v
}

pub fn unit(n: usize, k: usize) -> Vector {
    let mut v = vec![0.0; n];
    v[k] = 1.0;
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    One,
    #[default]
    Two,
    Inf,
}

pub fn vec_norm(v: &[f64], kind: NormKind) -> f64 {
    match kind {
        NormKind::One => v.iter().map(|x| x.abs()).sum(),
        NormKind::Two => norm2(v),
        NormKind::Inf => v.iter().fold(0.0_f64, |m, x| m.max(x.abs())),
    }
}

pub fn ensure_finite(v: &[f64], what: &str) -> Result<()> {
    match v.iter().position(|x| !x.is_finite()) {
        Some(i) => Err(Error::NonFinite(format!("{what}[{i}]"))),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms_of_small_vector() {
        let v = [3.0, -4.0];
        assert_eq!(vec_norm(&v, NormKind::One), 7.0);
        assert_eq!(vec_norm(&v, NormKind::Two), 5.0);
        assert_eq!(vec_norm(&v, NormKind::Inf), 4.0);
        assert_eq!(norm2(&[0.0, 0.0]), 0.0);
    }

    #[test]
    fn norm2_does_not_overflow() {
        let v = [1e200, 1e200];
        assert!((norm2(&v) / (1e200 * 2f64.sqrt()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn axpy_accumulates() {
        let mut y = vec![1.0, 1.0];
        axpy(2.0, &[1.0, -1.0], &mut y);
        assert_eq!(y, vec![3.0, -1.0]);
    }

    #[test]
    fn finite_check_reports_index() {
        assert!(ensure_finite(&[1.0, 2.0], "x").is_ok());
        assert_eq!(
            ensure_finite(&[1.0, f64::INFINITY], "x"),
            Err(Error::NonFinite("x[1]".into()))
        );
    }
}
