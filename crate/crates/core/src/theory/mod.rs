//! Executable identities and convergence bounds for 2x2 block preconditioning.

mod cg_bounds;
mod closed_form;
mod fixed_point;
mod gmres_bounds;
mod ideal;
mod norm_bounds;
mod report;
mod similarity;
mod suites;

pub use cg_bounds::{check_thm_cg, schur_cg_bounds};
pub use closed_form::{
    closed_form_power, direct_power, fp_schur_operator, preconditioned_schur, selector_spec, ClosedFormSelector,
    FpOperator,
};
pub use fixed_point::{
    check_remark23_periodicity, check_two_step_termination, saddle_block_diagonal_fixed_point,
    saddle_block_diagonal_propagator, PERIOD_TOL, TWO_STEP_TOL,
};
pub use gmres_bounds::{check_thm_ldu_gmres, check_thm_left_tri_gmres, check_thm_right_tri_gmres, preconditioned_operator};
pub use ideal::{ideal_norm, minimized_ideal_norm, polynomial_norm, sampled_ideal_norm, IdealNormEstimate, IdealOptions};
pub use norm_bounds::{check_thm_jacobi_norms, check_thm_norm_level};
pub use report::{BoundReport, DegreeBound, Provenance, Slack, ESTIMATE_SLACK, EXACT_SLACK};
pub use similarity::{check_commutation, check_prop22_similarity, check_qq_change_of_basis, q_defect, relative_defect, QForm, SimilarityVariant};
pub use suites::{run_suite, Suite, CONDITIONING_SWEEP, SuiteOptions, SuiteResult, IDENTITY_TOL, SIMILARITY_COND_LIMIT, STALL_ITERATIONS};
