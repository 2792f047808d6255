mod common;

use blockkrylov::dense::rng::{gaussian_vector, seeded_rng};
use blockkrylov::dense::Matrix;
use blockkrylov::krylov::Side;
use blockkrylov::precond::Family;
use blockkrylov::problems::{perturbed_schur, random_block, saddle_point, spd_block};
use blockkrylov::theory::{
    check_thm_cg, check_thm_ldu_gmres, check_thm_left_tri_gmres, check_thm_right_tri_gmres, closed_form_power,
    ideal_norm, run_suite, ClosedFormSelector, IdealOptions, Suite, SuiteOptions,
};
use blockkrylov::{BlockVector, SchurBlock};

#[test]
fn closed_forms_match_oracle_propagator_powers() {
    for seed in 0..3 {
        let (sys, _) = random_block(6, 4, seed, 10.0).unwrap();
        let a = common::to_rows(&sys.assemble());
        for sel in ClosedFormSelector::ALL {
            let block = sel.schur_block();
            let shat = if sel.uses_shat() {
                perturbed_schur(&sys, block, 0.3, seed + 10).unwrap()
            } else {
                sys.diag_block(block).clone()
            };
            let p = common::assembled(&sys, sel.family(), block, &common::to_rows(&shat));
            let x = common::propagator(&a, &p, sel.side() == Side::Left);
            for d in 1..=4 {
                let want = common::power(&x, sel.exponent(d));
                let got = common::to_rows(&closed_form_power(&sys, sel, d, &shat).unwrap());
                let scale = common::max_abs(&want).max(1e-300);
                assert!(common::max_abs_diff(&got, &want) <= 1e-9 * scale.max(1.0), "{sel} d={d}");
            }
        }
    }
}

#[test]
fn closed_forms_need_positive_degree() {
    let (sys, _) = random_block(3, 2, 1, 1.0).unwrap();
    let shat = sys.schur_complement(SchurBlock::S22).unwrap();
    assert!(closed_form_power(&sys, ClosedFormSelector::L22Left, 0, &shat).is_err());
}

#[test]
fn block_diagonal_fixed_point_on_saddle_point_is_periodic() {
    for seed in 0..3 {
        let (sys, _) = saddle_point(7, 3, seed).unwrap();
        let a = common::to_rows(&sys.assemble());
        let s = common::schur_by_elimination(&a, 7);
        let p = common::assembled(&sys, Family::BlockDiagonal, SchurBlock::S22, &s);
        let x = common::propagator(&a, &p, true);
        let x3 = common::power(&x, 3);
        let x9 = common::power(&x, 9);
        assert!(common::max_abs_diff(&x3, &x9) <= 1e-8 * common::max_abs(&x3));
        assert!(common::max_abs(&x3) > 1e-3, "the iteration does not terminate");
    }
}

fn residuals(n1: usize, n2: usize, seed: u64) -> Vec<BlockVector> {
    let mut rng = seeded_rng(seed);
    let r1 = gaussian_vector(&mut rng, n1);
    let r2 = gaussian_vector(&mut rng, n2);
    vec![
        BlockVector::new(r1.clone(), r2.clone()),
        BlockVector::new(vec![0.0; n1], r2),
        BlockVector::new(r1, vec![0.0; n2]),
    ]
}

#[test]
fn per_residual_chains_hold_for_left_ldu_and_triangular() {
    let degrees: Vec<usize> = (0..=10).collect();
    for seed in 0..3 {
        let (sys, _) = random_block(8, 5, seed, 10.0).unwrap();
        for block in [SchurBlock::S11, SchurBlock::S22] {
            let shat = perturbed_schur(&sys, block, 0.3, seed).unwrap();
            for r in residuals(8, 5, seed + 3) {
                let rep = check_thm_ldu_gmres(&sys, &shat, &r, Side::Left, block, &degrees).unwrap();
                assert!(rep.passed, "{}", rep.summary());
                let rep = check_thm_left_tri_gmres(&sys, &shat, &r, block, &degrees).unwrap();
                assert!(rep.passed, "{}", rep.summary());
                let rep = check_thm_right_tri_gmres(&sys, &shat, &r, block, &degrees).unwrap();
                assert!(rep.passed, "{}", rep.summary());
            }
        }
    }
}

#[test]
fn right_ldu_upper_bound_holds_even_where_the_lower_one_may_not() {
    let degrees: Vec<usize> = (0..=10).collect();
    for seed in 0..4 {
        let (sys, _) = random_block(8, 5, seed, 100.0).unwrap();
        let shat = perturbed_schur(&sys, SchurBlock::S22, 0.3, seed).unwrap();
        for r in residuals(8, 5, seed) {
            let rep = check_thm_ldu_gmres(&sys, &shat, &r, Side::Right, SchurBlock::S22, &degrees).unwrap();
            assert!(rep.rows.iter().all(|row| row.upper_ok), "{}", rep.summary());
            assert!(rep.provenance.notes.iter().any(|n| n.contains("coupled lower bound")));
        }
    }
}

#[test]
fn cg_chain_holds_on_spd_block_system() {
    let degrees: Vec<usize> = (0..=6).collect();
    let (sys, _) = spd_block(8, 5, 4).unwrap();
    let shat = sys.a22().clone();
    let e = residuals(8, 5, 1).remove(0);
    let rep = check_thm_cg(&sys, &shat, &e, SchurBlock::S22, &degrees).unwrap();
    assert!(rep.passed, "{}", rep.summary());
}

#[test]
fn ideal_norm_of_two_point_spectrum() {
    // min over α of max(|1 − α|, |1 − 2α|) is 1/3 at α = 2/3
    let b = Matrix::from_diag(&[1.0, 2.0, 2.0, 1.0]);
    let est = ideal_norm(&b, 1, &IdealOptions { samples: 50, ..IdealOptions::default() }).unwrap();
    assert!((est.minimized - 1.0 / 3.0).abs() < 1e-6, "{}", est.minimized);
    assert!(est.sampled <= est.minimized * (1.0 + 1e-9));
    let est = ideal_norm(&b, 2, &IdealOptions::default()).unwrap();
    assert!(est.minimized < 1e-8);
}

#[test]
fn small_suites_pass_with_seed_7() {
    let opts = SuiteOptions { seed: 7, systems: Some(3), max_degree: Some(4), samples: 40, ..SuiteOptions::default() };
    for suite in [Suite::TwoStep, Suite::ClosedForms, Suite::Periodicity, Suite::LduCg, Suite::LeftTriGmres, Suite::RightTriGmres] {
        let res = run_suite(suite, &opts).unwrap();
        assert_eq!(res.failed(), 0, "{}", suite.token());
    }
}

#[test]
fn suite_names_parse() {
    assert_eq!(Suite::parse_list("all").unwrap().len(), 9);
    assert_eq!(Suite::parse_list("thm31,ideal-norms").unwrap(), vec![Suite::LduGmres, Suite::IdealNorms]);
    assert!(Suite::parse_list("thm99").is_err());
}
