//! Finite termination and periodicity of block fixed-point iterations.

use crate::block::{BlockSystem2x2, SchurBlock};
use crate::dense::{two_norm, Vector};
use crate::error::{Error, Result};
use crate::krylov::{fixed_point, ConvergenceHistory, KrylovConfig};
use crate::precond::{build, error_propagator, Family, PreconditionerSpec, SchurApprox};

use super::report::{BoundReport, Provenance, Slack};

/// Relative residual that counts as converged for the two-step property.
pub const TWO_STEP_TOL: f64 = 1e-10;
/// Tolerance on `‖X^{3(d+2)} − X^{3d}‖ / ‖X^{3d}‖`.
pub const PERIOD_TOL: f64 = 1e-8;

/// Runs fixed-point iteration with a triangular preconditioner built on the
/// exact Schur complement. The report holds the relative residual per
/// iteration: above the tolerance after one step, below it after two.
pub fn check_two_step_termination(
    sys: &BlockSystem2x2,
    family: Family,
    block: SchurBlock,
    b: &[f64],
) -> Result<(BoundReport, ConvergenceHistory)> {
    if !matches!(family, Family::LowerTriangular | Family::UpperTriangular) {
        return Err(Error::InvalidConfig(format!(
            "two-step termination concerns block-triangular preconditioners, not {}",
            family.token()
        )));
    }
    let spec = PreconditionerSpec::new(family, block, SchurApprox::ExactSchur);
    let p = build(sys, &spec)?;
    let cfg = KrylovConfig::fixed_point(TWO_STEP_TOL, 10);
    let x0 = vec![0.0; sys.dim()];
    let (_, history) = fixed_point(sys, &p, b, &x0, &cfg)?;
    let rel = history.relative();
    let mut report = BoundReport::new("two-step termination", Slack::Exact { rel: 0.0 }, 0.0).with_provenance(Provenance {
        spec: Some(spec.to_string()),
        schur_block: Some(block),
        ..Provenance::default()
    });
    let at = |k: usize| rel.get(k).copied().unwrap_or(0.0);
    report.push(1, Some(TWO_STEP_TOL), at(1), None);
    report.push(2, None, at(2), Some(TWO_STEP_TOL));
    if history.iterations != 2 {
        report.passed = false;
        report.note(format!("converged after {} iterations", history.iterations));
    }
    Ok((report, history))
}

/// Error propagator `I − D22⁻¹B` of block-diagonal preconditioning with the
/// exact Schur complement on a saddle-point system.
pub fn saddle_block_diagonal_propagator(sys: &BlockSystem2x2) -> Result<crate::dense::Matrix> {
    if !sys.is_saddle_point() {
        return Err(Error::Precondition(
            "periodicity holds for saddle-point systems with a zero (2,2) block".into(),
        ));
    }
    let spec = PreconditionerSpec::new(Family::BlockDiagonal, SchurBlock::S22, SchurApprox::ExactSchur);
    error_propagator(sys, &spec)
}

/// `X^{3(d+2)} = X^{3d}` for `d = 1..=3`, `X = I − D22⁻¹B`.
pub fn check_remark23_periodicity(sys: &BlockSystem2x2) -> Result<BoundReport> {
    let x = saddle_block_diagonal_propagator(sys)?;
    let x3 = x.pow(3);
    let mut report = BoundReport::new("block-diagonal periodicity", Slack::Exact { rel: 0.0 }, 0.0)
        .with_provenance(Provenance {
            spec: Some("BD:22:exact".into()),
            schur_block: Some(SchurBlock::S22),
            ..Provenance::default()
        });
    let mut power = x3.clone();
    for d in 1..=3 {
        let later = &(&power * &x3) * &x3;
        let scale = two_norm(&power).max(f64::MIN_POSITIVE);
        report.push_defect(d, two_norm(&(&later - &power)) / scale, PERIOD_TOL);
        power = &power * &x3;
    }
    Ok(report)
}

/// Fixed-point history for `D22` with the exact Schur complement.
pub fn saddle_block_diagonal_fixed_point(sys: &BlockSystem2x2, b: &[f64], max_iter: usize) -> Result<(Vector, ConvergenceHistory)> {
    let spec = PreconditionerSpec::new(Family::BlockDiagonal, SchurBlock::S22, SchurApprox::ExactSchur);
    let p = build(sys, &spec)?;
    let cfg = KrylovConfig::fixed_point(1e-10, max_iter);
    fixed_point(sys, &p, b, &vec![0.0; sys.dim()], &cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::rng::{gaussian_matrix, gaussian_vector, seeded_rng};
    use crate::dense::Matrix;

    #[test]
    fn identity_coupling_gives_order_six() {
        let i = Matrix::identity(2);
        let sys = BlockSystem2x2::new(i.clone(), i.clone(), i.clone(), Matrix::zeros(2, 2)).unwrap();
        let x = saddle_block_diagonal_propagator(&sys).unwrap();
        let x3 = x.pow(3);
        assert!((&x3 + &Matrix::identity(4)).max_abs() < 1e-14);
        assert!((&x.pow(6) - &x3).max_abs() > 1.0);
        assert!((&x.pow(9) - &x3).max_abs() < 1e-14);
        assert!(check_remark23_periodicity(&sys).unwrap().passed);
    }

    #[test]
    fn random_saddle_is_periodic_and_does_not_converge() {
        let mut rng = seeded_rng(9);
        let b21 = gaussian_matrix(&mut rng, 3, 6);
        let sys = BlockSystem2x2::new(Matrix::identity(6), b21.transpose(), b21, Matrix::zeros(3, 3)).unwrap();
        let report = check_remark23_periodicity(&sys).unwrap();
        assert!(report.passed, "{}", report.summary());
        let b = gaussian_vector(&mut rng, 9);
        let (_, h) = saddle_block_diagonal_fixed_point(&sys, &b, 200).unwrap();
        assert!(!h.converged);
    }

    #[test]
    fn non_saddle_is_refused() {
        let i = Matrix::identity(2);
        let sys = BlockSystem2x2::new(i.clone(), i.clone(), i.clone(), i).unwrap();
        assert!(matches!(check_remark23_periodicity(&sys), Err(Error::Precondition(_))));
    }

    #[test]
    fn triangular_with_exact_schur_terminates_in_two_steps() {
        let mut rng = seeded_rng(10);
        let shift = |m: Matrix| &m + &Matrix::identity(m.rows()).scale(3.0);
        let sys = BlockSystem2x2::new(
            shift(gaussian_matrix(&mut rng, 5, 5)),
            gaussian_matrix(&mut rng, 5, 4),
            gaussian_matrix(&mut rng, 4, 5),
            shift(gaussian_matrix(&mut rng, 4, 4)),
        )
        .unwrap();
        let b = gaussian_vector(&mut rng, 9);
        for family in [Family::LowerTriangular, Family::UpperTriangular] {
            for block in [SchurBlock::S11, SchurBlock::S22] {
                let (report, h) = check_two_step_termination(&sys, family, block, &b).unwrap();
                assert!(report.passed, "{}", report.summary());
                assert_eq!(h.iterations, 2);
            }
        }
        assert!(check_two_step_termination(&sys, Family::BlockLdu, SchurBlock::S22, &b).is_err());
    }
}
