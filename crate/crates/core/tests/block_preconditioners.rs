mod common;

use common::{add, assembled, identity, Rows};

use blockkrylov::dense::rng::{gaussian_matrix, gaussian_vector, seeded_rng};
use blockkrylov::dense::Matrix;
use blockkrylov::krylov::{gmres, KrylovConfig, Preconditioner, Side};
use blockkrylov::precond::{build, Family, PreconditionerSpec, SchurApprox};
use blockkrylov::problems::{random_block, saddle_point};
use blockkrylov::{BlockSystem2x2, SchurBlock};
use proptest::prelude::*;

fn explicit_inverse(p: &dyn Preconditioner) -> Rows {
    let n = p.dim();
    let cols: Vec<Vec<f64>> = (0..n).map(|j| p.apply(&identity(n)[j])).collect();
    (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect()
}

fn inverse(a: &Rows) -> Rows {
    common::solve_many(a, &identity(a.len()))
}

fn system(seed: u64) -> BlockSystem2x2 {
    random_block(7, 5, seed, 10.0).unwrap().0
}

fn user_shat(sys: &BlockSystem2x2, block: SchurBlock, seed: u64) -> Matrix {
    let s = sys.schur_complement(block).unwrap();
    let n = s.rows();
    &s + &gaussian_matrix(&mut seeded_rng(seed), n, n).scale(0.2 / (n as f64).sqrt())
}

#[test]
fn schur_complement_matches_elimination() {
    for seed in 0..5 {
        let sys = system(seed);
        let want = common::schur_by_elimination(&common::to_rows(&sys.assemble()), sys.n1());
        let got = common::to_rows(&sys.schur_complement(SchurBlock::S22).unwrap());
        assert!(common::max_abs_diff(&got, &want) < 1e-10 * common::max_abs(&want));
    }
}

#[test]
fn single_sweep_families_apply_the_inverse_of_their_block_matrix() {
    for seed in 0..4 {
        let sys = system(seed);
        for block in [SchurBlock::S11, SchurBlock::S22] {
            let shat = user_shat(&sys, block, 40 + seed);
            for family in [Family::BlockDiagonal, Family::LowerTriangular, Family::UpperTriangular, Family::BlockLdu] {
                for negate in [false, true] {
                    let mut spec = PreconditionerSpec::with_user(family, block, shat.clone());
                    let mut sh = common::to_rows(&shat);
                    if negate {
                        spec = spec.negated();
                        sh = common::to_rows(&shat.scale(-1.0));
                    }
                    let p = build(&sys, &spec).unwrap();
                    let want = inverse(&assembled(&sys, family, block, &sh));
                    let got = explicit_inverse(&p);
                    let err = common::max_abs_diff(&got, &want);
                    assert!(err < 1e-9 * common::max_abs(&want), "{family:?} {block:?} neg={negate}: {err:e}");
                }
            }
        }
    }
}

#[test]
fn symmetric_sweeps_compose_the_triangular_propagators() {
    let sys = system(11);
    let a = common::to_rows(&sys.assemble());
    let n = sys.dim();
    for block in [SchurBlock::S11, SchurBlock::S22] {
        let shat = user_shat(&sys, block, 3);
        let sh = common::to_rows(&shat);
        let l_inv = inverse(&assembled(&sys, Family::LowerTriangular, block, &sh));
        let u_inv = inverse(&assembled(&sys, Family::UpperTriangular, block, &sh));
        let prop = |m_inv: &Rows| {
            let ma = common::matmul(m_inv, &a);
            add(&identity(n), &ma.iter().map(|r| r.iter().map(|v| -v).collect()).collect())
        };
        let (el, eu) = (prop(&l_inv), prop(&u_inv));
        for (family, want) in [
            (Family::SymTriLu, common::matmul(&eu, &el)),
            (Family::SymTriUl, common::matmul(&el, &eu)),
        ] {
            let p = build(&sys, &PreconditionerSpec::with_user(family, block, shat.clone())).unwrap();
            let got = prop(&explicit_inverse(&p));
            assert!(common::max_abs_diff(&got, &want) < 1e-8, "{family:?} {block:?}");
        }
    }
}

#[test]
fn exact_schur_triangular_gmres_terminates_in_two_steps() {
    for seed in 0..5 {
        let (sys, b) = random_block(8, 6, seed, 100.0).unwrap();
        for family in [Family::LowerTriangular, Family::UpperTriangular] {
            for block in [SchurBlock::S11, SchurBlock::S22] {
                for side in [Side::Left, Side::Right] {
                    let p = build(&sys, &PreconditionerSpec::new(family, block, SchurApprox::ExactSchur)).unwrap();
                    let cfg = KrylovConfig::gmres(side, 1e-10, 50);
                    let (_, h) = gmres(&sys, Some(&p), &b, &vec![0.0; b.len()], &cfg).unwrap();
                    assert!(h.converged && h.iterations <= 2, "{family:?} {block:?} {side:?}: {}", h.iterations);
                }
            }
        }
        let p = build(&sys, &PreconditionerSpec::new(Family::BlockLdu, SchurBlock::S22, SchurApprox::ExactSchur)).unwrap();
        let (_, h) = gmres(&sys, Some(&p), &b, &vec![0.0; b.len()], &KrylovConfig::gmres(Side::Right, 1e-10, 50)).unwrap();
        assert!(h.iterations <= 1);
    }
}

#[test]
fn block_diagonal_exact_schur_on_saddle_point_needs_three_steps() {
    for seed in 0..4 {
        let (sys, b) = saddle_point(10, 4, seed).unwrap();
        let p = build(&sys, &PreconditionerSpec::new(Family::BlockDiagonal, SchurBlock::S22, SchurApprox::ExactSchur)).unwrap();
        let (_, h) = gmres(&sys, Some(&p), &b, &vec![0.0; b.len()], &KrylovConfig::gmres(Side::Left, 1e-10, 50)).unwrap();
        assert!(h.converged && h.iterations <= 3, "{}", h.iterations);
        assert!(h.iterations >= 2);
    }
}

#[test]
fn mismatched_user_schur_is_rejected() {
    let sys = system(1);
    let spec = PreconditionerSpec::with_user(Family::LowerTriangular, SchurBlock::S22, Matrix::identity(3));
    assert!(build(&sys, &spec).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn preconditioner_application_is_linear(seed in 0u64..5_000, fam in 0usize..6, blk in 0usize..2) {
        let sys = system(seed);
        let block = [SchurBlock::S11, SchurBlock::S22][blk];
        let spec = PreconditionerSpec::with_user(Family::ALL[fam], block, user_shat(&sys, block, seed + 7));
        let p = build(&sys, &spec).unwrap();
        let mut rng = seeded_rng(seed ^ 0xabc);
        let u = gaussian_vector(&mut rng, sys.dim());
        let v = gaussian_vector(&mut rng, sys.dim());
        let combo: Vec<f64> = u.iter().zip(&v).map(|(x, y)| 2.0 * x - 3.0 * y).collect();
        let lhs = p.apply(&combo);
        let (pu, pv) = (p.apply(&u), p.apply(&v));
        let scale = lhs.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
        for i in 0..lhs.len() {
            prop_assert!((lhs[i] - (2.0 * pu[i] - 3.0 * pv[i])).abs() < 1e-9 * scale);
        }
    }

    #[test]
    fn block_diagonal_is_insensitive_to_coupling_blocks(seed in 0u64..5_000) {
        let sys = system(seed);
        let scaled = BlockSystem2x2::new(
            sys.a11().clone(),
            sys.a12().scale(5.0),
            sys.a21().scale(-3.0),
            sys.a22().clone(),
        ).unwrap();
        let spec = PreconditionerSpec::block_jacobi();
        let v = gaussian_vector(&mut seeded_rng(seed), sys.dim());
        let (x, y) = (build(&sys, &spec).unwrap().apply(&v), build(&scaled, &spec).unwrap().apply(&v));
        prop_assert_eq!(x, y);
    }
}
