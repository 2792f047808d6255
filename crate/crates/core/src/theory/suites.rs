//! Named verification suites over seeded problem families.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::block::{BlockSystem2x2, BlockVector, SchurBlock};
use crate::dense::rng::{gaussian_vector, seeded_rng, DEFAULT_SEED};
use crate::dense::{inverse, two_norm, Matrix};
use crate::error::{Error, Result};
use crate::krylov::{PolynomialCoeffs, Side};
use crate::precond::Family;
use crate::problems::{perturbed_schur, random_block, saddle_point, spd_block};

use super::cg_bounds::check_thm_cg;
use super::closed_form::{closed_form_power, direct_power, fp_schur_operator, ClosedFormSelector};
use super::fixed_point::{check_remark23_periodicity, check_two_step_termination, saddle_block_diagonal_fixed_point};
use super::gmres_bounds::{check_thm_ldu_gmres, check_thm_left_tri_gmres, check_thm_right_tri_gmres};
use super::ideal::IdealOptions;
use super::norm_bounds::{check_thm_jacobi_norms, check_thm_norm_level};
use super::report::{BoundReport, Provenance, Slack};
use super::similarity::{check_commutation, check_prop22_similarity, q_defect, QForm, SimilarityVariant};

/// Tolerance for the matrix identities (closed forms, similarities).
pub const IDENTITY_TOL: f64 = 1e-9;
/// Condition number above which a system is skipped for the similarity checks.
pub const SIMILARITY_COND_LIMIT: f64 = 1e8;
/// Iterations after which block-diagonal fixed point must still be stuck.
pub const STALL_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    /// Fixed point with exact-Schur triangular preconditioners.
    TwoStep,
    /// Triangular/LDU similarities and the change of basis.
    Similarity,
    /// Closed-form powers of the fixed-point operators.
    ClosedForms,
    /// Periodicity of block-diagonal fixed point on saddle points.
    Periodicity,
    /// Per-residual GMRES chain for block LDU.
    LduGmres,
    /// CG chain for block LDU on SPD systems.
    LduCg,
    /// Per-residual GMRES chain for left triangular preconditioning.
    LeftTriGmres,
    /// Per-residual GMRES chain for right triangular preconditioning.
    RightTriGmres,
    /// Ideal-norm chains, including block Jacobi.
    IdealNorms,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::TwoStep,
        Suite::Similarity,
        Suite::ClosedForms,
        Suite::Periodicity,
        Suite::LduGmres,
        Suite::LduCg,
        Suite::LeftTriGmres,
        Suite::RightTriGmres,
        Suite::IdealNorms,
    ];

    /// CLI token.
    pub fn token(self) -> &'static str {
        match self {
            Suite::TwoStep => "prop21",
            Suite::Similarity => "prop22",
            Suite::ClosedForms => "closedforms",
            Suite::Periodicity => "remark23",
            Suite::LduGmres => "thm31",
            Suite::LduCg => "thm32",
            Suite::LeftTriGmres => "thm33",
            Suite::RightTriGmres => "thm34",
            Suite::IdealNorms => "thm35",
        }
    }

    fn alias(self) -> &'static str {
        match self {
            Suite::TwoStep => "two-step",
            Suite::Similarity => "similarity",
            Suite::ClosedForms => "closed-forms",
            Suite::Periodicity => "periodicity",
            Suite::LduGmres => "ldu-gmres",
            Suite::LduCg => "ldu-cg",
            Suite::LeftTriGmres => "left-tri-gmres",
            Suite::RightTriGmres => "right-tri-gmres",
            Suite::IdealNorms => "ideal-norms",
        }
    }

    /// Parses one suite token or `all`.
    pub fn parse_list(s: &str) -> Result<Vec<Suite>> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(Suite::ALL.to_vec());
        }
        s.split(',').map(|t| t.trim().parse()).collect()
    }
}

impl Serialize for Suite {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.token())
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.token().eq_ignore_ascii_case(s) || x.alias().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown verification suite {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Number of systems; `None` picks the suite's default.
    pub systems: Option<usize>,
    /// Residuals per system for the per-residual chains.
    pub residuals: usize,
    /// Largest degree; `None` picks the suite's default.
    pub max_degree: Option<usize>,
    /// Random start vectors for ideal-norm estimates.
    pub samples: usize,
    /// Random consistent polynomials per system for the similarities.
    pub polynomials: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            systems: None,
            residuals: 3,
            max_degree: None,
            samples: 200,
            polynomials: 20,
        }
    }
}

impl SuiteOptions {
    fn systems_or(&self, default: usize) -> usize {
        self.systems.unwrap_or(default)
    }

    fn degrees_or(&self, default: usize) -> Vec<usize> {
        (1..=self.max_degree.unwrap_or(default)).collect()
    }

    fn system_seed(&self, i: usize) -> u64 {
        self.seed.wrapping_add(i as u64)
    }
}

/// Reports of one suite, in a deterministic order.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub suite: Suite,
    pub reports: Vec<BoundReport>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.passed)
    }

    pub fn failed(&self) -> usize {
        self.reports.iter().filter(|r| !r.passed).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("suite result serializes")
    }
}

/// Runs a suite; independent systems are processed on the current rayon pool.
pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<SuiteResult> {
    let reports = match suite {
        Suite::TwoStep => per_system(opts.systems_or(10), |i| two_step(opts, i))?,
        Suite::Similarity => similarity(opts)?,
        Suite::ClosedForms => per_system(opts.systems_or(10), |i| closed_forms(opts, i))?,
        Suite::Periodicity => per_system(opts.systems_or(5), |i| periodicity(opts, i))?,
        Suite::LduGmres => per_system(opts.systems_or(20), |i| {
            residual_chains(opts, i, |sys, shat, r, block, degrees| {
                let mut out = Vec::new();
                for side in [Side::Left, Side::Right] {
                    out.push(check_thm_ldu_gmres(sys, shat, r, side, block, degrees)?);
                }
                Ok(out)
            })
        })?,
        Suite::LeftTriGmres => per_system(opts.systems_or(20), |i| {
            residual_chains(opts, i, |sys, shat, r, block, degrees| {
                Ok(vec![check_thm_left_tri_gmres(sys, shat, r, block, degrees)?])
            })
        })?,
        Suite::RightTriGmres => per_system(opts.systems_or(20), |i| {
            residual_chains(opts, i, |sys, shat, r, block, degrees| {
                Ok(vec![check_thm_right_tri_gmres(sys, shat, r, block, degrees)?])
            })
        })?,
        Suite::LduCg => per_system(opts.systems_or(10), |i| ldu_cg(opts, i))?,
        Suite::IdealNorms => per_system(opts.systems_or(10), |i| ideal_norms(opts, i))?,
    };
    Ok(SuiteResult { suite, reports })
}

fn per_system<F>(count: usize, f: F) -> Result<Vec<BoundReport>>
where
    F: Fn(usize) -> Result<Vec<BoundReport>> + Sync + Send,
{
    let chunks: Vec<Vec<BoundReport>> = (0..count).into_par_iter().map(f).collect::<Result<_>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

fn tag(mut report: BoundReport, seed: u64, problem: &str) -> BoundReport {
    report.provenance.seed = Some(seed);
    report.provenance.problem = Some(problem.to_string());
    report
}

/// Conditioning of the diagonal blocks cycles through this list with the
/// system index, so every suite sees weak and strong coupling.
pub const CONDITIONING_SWEEP: [f64; 3] = [1.0, 10.0, 100.0];

fn random_problem(i: usize, seed: u64, n1: usize, n2: usize) -> Result<(BlockSystem2x2, String)> {
    let cond = CONDITIONING_SWEEP[i % CONDITIONING_SWEEP.len()];
    let (sys, _) = random_block(n1, n2, seed, cond)?;
    Ok((sys, format!("random:n1={n1},n2={n2},seed={seed},cond={cond}")))
}

/// `Ŝ` used on random systems: `A_kk` for even indices, a 30% perturbation of
/// the exact Schur complement for odd ones.
fn shat_for(sys: &BlockSystem2x2, block: SchurBlock, i: usize, seed: u64) -> Result<Matrix> {
    if i % 2 == 0 {
        Ok(sys.diag_block(block).clone())
    } else {
        perturbed_schur(sys, block, 0.3, seed ^ 0x5eed)
    }
}

fn two_step(opts: &SuiteOptions, i: usize) -> Result<Vec<BoundReport>> {
    let seed = opts.system_seed(i);
    let (sys, id) = random_problem(i, seed, 10, 6)?;
    let b = gaussian_vector(&mut seeded_rng(seed ^ 0xb), sys.dim());
    let mut out = Vec::new();
    for family in [Family::LowerTriangular, Family::UpperTriangular] {
        for block in [SchurBlock::S11, SchurBlock::S22] {
            let (rep, _) = check_two_step_termination(&sys, family, block, &b)?;
            out.push(tag(rep, seed, &id));
        }
    }
    Ok(out)
}

fn condition(m: &Matrix) -> f64 {
    match inverse(m) {
        Ok(inv) => two_norm(m) * two_norm(&inv),
        Err(_) => f64::INFINITY,
    }
}

fn similarity(opts: &SuiteOptions) -> Result<Vec<BoundReport>> {
    let wanted = opts.systems_or(10);
    let mut out = Vec::new();
    let mut accepted = 0;
    let mut i = 0;
    while accepted < wanted {
        if i >= 20 * wanted.max(1) {
            return Err(Error::Precondition(format!(
                "only {accepted} of {wanted} systems had well-conditioned fixed-point operators"
            )));
        }
        let seed = opts.system_seed(i);
        let (sys, id) = random_problem(i, seed, 8, 6)?;
        let shats = [
            (SchurBlock::S11, shat_for(&sys, SchurBlock::S11, i, seed)?),
            (SchurBlock::S22, shat_for(&sys, SchurBlock::S22, i, seed)?),
        ];
        let shat = |b: SchurBlock| &shats.iter().find(|(k, _)| *k == b).expect("both blocks").1;
        let well_conditioned = SimilarityVariant::ALL.iter().all(|v| {
            let op = fp_schur_operator(&sys, v.fixed_point_operator(), shat(v.schur_block()));
            op.map(|m| condition(&m) < SIMILARITY_COND_LIMIT).unwrap_or(false)
        });
        i += 1;
        if !well_conditioned {
            continue;
        }
        accepted += 1;

        let mut rng = seeded_rng(seed ^ 0x9017);
        let polys: Vec<PolynomialCoeffs> = (0..opts.polynomials)
            .map(|k| PolynomialCoeffs::random_consistent(&mut rng, 1 + k % 8))
            .collect();
        for v in SimilarityVariant::ALL {
            let mut rep = BoundReport::new(format!("similarity {}", v.name()), Slack::Exact { rel: 0.0 }, 0.0);
            for p in &polys {
                rep.push_defect(p.degree(), check_prop22_similarity(&sys, shat(v.schur_block()), p, v)?, IDENTITY_TOL);
            }
            rep.provenance.schur_block = Some(v.schur_block());
            out.push(tag(rep, seed, &id));
        }
        let mut rep = BoundReport::new("change of basis Q", Slack::Exact { rel: 0.0 }, 0.0);
        let mut worst_literal: f64 = 0.0;
        for p in &polys {
            rep.push_defect(p.degree(), q_defect(&sys, shat(SchurBlock::S22), p, QForm::Derived)?, IDENTITY_TOL);
            worst_literal = worst_literal.max(q_defect(&sys, shat(SchurBlock::S22), p, QForm::Literal)?);
        }
        rep.note(format!("literal Q = [I, A11⁻¹A12·E22; 0, E22] has worst defect {worst_literal:.3e}"));
        out.push(tag(rep, seed, &id));
        let mut rep = BoundReport::new("commutation", Slack::Exact { rel: 0.0 }, 0.0);
        for p in &polys {
            rep.push_defect(p.degree(), check_commutation(&sys, p)?, IDENTITY_TOL);
        }
        out.push(tag(rep, seed, &id));
    }
    Ok(out)
}

fn closed_forms(opts: &SuiteOptions, i: usize) -> Result<Vec<BoundReport>> {
    let seed = opts.system_seed(i);
    let (sys, id) = random_problem(i, seed, 7, 5)?;
    let mut out = Vec::new();
    for sel in ClosedFormSelector::ALL {
        let shat = shat_for(&sys, sel.schur_block(), i, seed)?;
        let mut rep = BoundReport::new(format!("closed form {}", sel.name()), Slack::Exact { rel: 0.0 }, 0.0);
        for d in opts.degrees_or(5) {
            let closed = closed_form_power(&sys, sel, d, &shat)?;
            let direct = direct_power(&sys, sel, d, &shat)?;
            rep.push_defect(d, super::similarity::relative_defect(&closed, &direct), IDENTITY_TOL);
        }
        rep.provenance.side = Some(sel.side());
        rep.provenance.schur_block = Some(sel.schur_block());
        out.push(tag(rep, seed, &id));
    }
    Ok(out)
}

fn periodicity(opts: &SuiteOptions, i: usize) -> Result<Vec<BoundReport>> {
    let seed = opts.system_seed(i);
    let (sys, b) = saddle_point(8, 5, seed)?;
    let id = format!("saddle:n1=8,n2=5,seed={seed}");
    let periodic = check_remark23_periodicity(&sys)?;
    let (_, history) = saddle_block_diagonal_fixed_point(&sys, &b, STALL_ITERATIONS)?;
    let mut stall = BoundReport::new("block-diagonal fixed point stalls", Slack::Exact { rel: 0.0 }, 0.0)
        .with_provenance(Provenance { spec: Some("BD:22:exact".into()), ..Provenance::default() });
    // the final relative residual must stay above the fixed-point tolerance
    stall.push(history.iterations, Some(1e-10), history.final_relative(), None);
    if history.converged {
        stall.passed = false;
        stall.note(format!("converged after {} iterations", history.iterations));
    }
    Ok(vec![tag(periodic, seed, &id), tag(stall, seed, &id)])
}

/// Three residuals per system: Gaussian, zero first block, zero second block.
fn residuals(seed: u64, n1: usize, n2: usize, count: usize) -> Vec<BlockVector> {
    let mut rng = seeded_rng(seed ^ 0x4e5);
    (0..count)
        .map(|k| {
            let mut r1 = gaussian_vector(&mut rng, n1);
            let mut r2 = gaussian_vector(&mut rng, n2);
            match k % 3 {
                1 => r1.iter_mut().for_each(|x| *x = 0.0),
                2 => r2.iter_mut().for_each(|x| *x = 0.0),
                _ => {}
            }
            BlockVector::new(r1, r2)
        })
        .collect()
}

fn residual_chains<F>(opts: &SuiteOptions, i: usize, check: F) -> Result<Vec<BoundReport>>
where
    F: Fn(&BlockSystem2x2, &Matrix, &BlockVector, SchurBlock, &[usize]) -> Result<Vec<BoundReport>>,
{
    let seed = opts.system_seed(i);
    let (sys, id) = random_problem(i, seed, 10, 6)?;
    let degrees = opts.degrees_or(15);
    let mut out = Vec::new();
    for block in [SchurBlock::S11, SchurBlock::S22] {
        let shat = shat_for(&sys, block, i, seed)?;
        for r in residuals(seed, sys.n1(), sys.n2(), opts.residuals) {
            out.extend(check(&sys, &shat, &r, block, &degrees)?.into_iter().map(|rep| tag(rep, seed, &id)));
        }
    }
    Ok(out)
}

fn ldu_cg(opts: &SuiteOptions, i: usize) -> Result<Vec<BoundReport>> {
    let seed = opts.system_seed(i);
    let (sys, _) = spd_block(10, 6, seed)?;
    let id = format!("spd:n1=10,n2=6,seed={seed}");
    let degrees = opts.degrees_or(8);
    let mut rng = seeded_rng(seed ^ 0xe);
    let mut out = Vec::new();
    for block in [SchurBlock::S11, SchurBlock::S22] {
        let shat = sys.diag_block(block).clone();
        let e = BlockVector::new(gaussian_vector(&mut rng, sys.n1()), gaussian_vector(&mut rng, sys.n2()));
        out.push(tag(check_thm_cg(&sys, &shat, &e, block, &degrees)?, seed, &id));
    }
    Ok(out)
}

fn ideal_norms(opts: &SuiteOptions, i: usize) -> Result<Vec<BoundReport>> {
    let seed = opts.system_seed(i);
    let (sys, id) = random_problem(i, seed, 6, 4)?;
    let degrees = opts.degrees_or(4);
    let iopts = IdealOptions { samples: opts.samples, starts: 3, seed };
    let mut out = Vec::new();
    let cases = [
        (Family::BlockLdu, Side::Left, SchurBlock::S11),
        (Family::BlockLdu, Side::Left, SchurBlock::S22),
        (Family::BlockLdu, Side::Right, SchurBlock::S11),
        (Family::BlockLdu, Side::Right, SchurBlock::S22),
        (Family::UpperTriangular, Side::Left, SchurBlock::S11),
        (Family::LowerTriangular, Side::Left, SchurBlock::S22),
        (Family::LowerTriangular, Side::Right, SchurBlock::S11),
        (Family::UpperTriangular, Side::Right, SchurBlock::S22),
    ];
    for (family, side, block) in cases {
        let shat = shat_for(&sys, block, i, seed)?;
        out.push(tag(check_thm_norm_level(&sys, &shat, family, side, block, &degrees, &iopts)?, seed, &id));
    }
    for side in [Side::Left, Side::Right] {
        out.push(tag(check_thm_jacobi_norms(&sys, &degrees, side, &iopts)?, seed, &id));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_parse() {
        for s in Suite::ALL {
            assert_eq!(s.token().parse::<Suite>().unwrap(), s);
            assert_eq!(s.alias().parse::<Suite>().unwrap(), s);
        }
        assert_eq!(Suite::parse_list("all").unwrap().len(), 9);
        assert_eq!(Suite::parse_list("prop21,thm32").unwrap(), vec![Suite::TwoStep, Suite::LduCg]);
        assert!(Suite::parse_list("thm36").is_err());
    }

    #[test]
    fn small_suites_pass() {
        let opts = SuiteOptions { systems: Some(2), max_degree: Some(3), polynomials: 4, samples: 20, ..SuiteOptions::default() };
        for s in [Suite::TwoStep, Suite::Similarity, Suite::ClosedForms, Suite::Periodicity, Suite::LduCg, Suite::LeftTriGmres] {
            let res = run_suite(s, &opts).unwrap();
            assert!(res.passed(), "{s}: {:?}", res.reports.iter().find(|r| !r.passed).map(|r| r.summary()));
        }
    }

    #[test]
    fn reports_carry_provenance() {
        let opts = SuiteOptions { systems: Some(1), ..SuiteOptions::default() };
        let res = run_suite(Suite::TwoStep, &opts).unwrap();
        assert_eq!(res.reports.len(), 4);
        assert!(res.reports.iter().all(|r| r.provenance.seed == Some(opts.seed)));
        assert!(res.to_json().contains("\"suite\": \"prop21\""));
    }
}
