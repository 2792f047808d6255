use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::dense::{is_spd, Vector};
use crate::error::{Error, Result};
use crate::krylov::{
    cg, fgmres, fixed_point, gmres, CgMonitor, ConvergenceHistory, IdentityPreconditioner, Method, Preconditioner,
    Termination,
};
use crate::mtx::{read_block_system, read_matrix, write_block_system, write_matrix};
use crate::precond::{build, PreconditionerSpec};
use crate::problems::{generate, run_named, Experiment, ExperimentOptions, Problem, ProblemMatrix, ProblemSpec};
use crate::theory::{run_suite, Suite, SuiteOptions};

use super::config::{Command, RunConfig};
use super::{EXIT_BOUND_FAILED, EXIT_NOT_CONVERGED, EXIT_OK};

/// Exit code, written artifacts and the lines to print.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub code: i32,
    pub artifacts: Vec<PathBuf>,
    pub lines: Vec<String>,
}

pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    let work = || match cfg.command {
        Command::Solve => run_solve(cfg),
        Command::Verify => run_verify(cfg),
        Command::Experiment => run_experiment(cfg),
        Command::Generate => run_generate(cfg),
    };
    match cfg.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("cannot start {n} workers: {e}")))?
            .install(work),
        None => work(),
    }
}

fn write(dir: &Path, name: &str, contents: &str, artifacts: &mut Vec<PathBuf>) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    artifacts.push(path);
    Ok(())
}

fn load_problem(cfg: &RunConfig) -> Result<Problem> {
    if let Some(spec) = &cfg.problem {
        return generate(&ProblemSpec::parse_with_seed(spec, cfg.seed)?);
    }
    let (matrix, id) = if let Some(stem) = &cfg.blocks {
        (ProblemMatrix::Block(read_block_system(stem)?), stem.display().to_string())
    } else if let Some(path) = &cfg.matrix {
        let a = read_matrix(path)?;
        let m = match cfg.n1 {
            Some(n1) => ProblemMatrix::Block(crate::block::BlockSystem2x2::from_monolithic(&a, n1)?),
            None => {
                if !a.is_square() {
                    return Err(Error::DimensionMismatch(format!("matrix is {}x{}", a.rows(), a.cols())));
                }
                ProblemMatrix::Plain(a)
            }
        };
        (m, path.display().to_string())
    } else {
        return Err(Error::InvalidConfig("no problem source given".into()));
    };
    let n = match &matrix {
        ProblemMatrix::Block(s) => s.dim(),
        ProblemMatrix::Plain(m) => m.rows(),
    };
    Ok(Problem { id, matrix, rhs: vec![1.0; n] })
}

fn load_rhs(path: &Path) -> Result<Vector> {
    let m = read_matrix(path)?;
    if m.cols() != 1 && m.rows() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side must be a vector, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(m.into_vec())
}

#[derive(Serialize)]
struct SolveSummary<'a> {
    problem: &'a str,
    precond: Option<String>,
    method: Method,
    side: crate::krylov::Side,
    seed: u64,
    iterations: usize,
    converged: bool,
    termination: Termination,
    initial_residual: f64,
    final_relative_residual: f64,
    degraded_applies: usize,
    wall_time_s: f64,
}

/// Solves one system; writes `solve_history.csv` and `solve_summary.json`.
pub fn run_solve(cfg: &RunConfig) -> Result<RunOutcome> {
    let mut problem = load_problem(cfg)?;
    if let Some(path) = &cfg.rhs {
        problem.rhs = load_rhs(path)?;
    }
    let n = problem.operator().dim();
    if problem.rhs.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side has length {} but the matrix has dimension {n}",
            problem.rhs.len()
        )));
    }
    let kcfg = cfg.krylov();
    let spec = cfg.precond.as_deref().map(PreconditionerSpec::parse).transpose()?;
    let built = match &spec {
        Some(s) => {
            let sys = problem.block().ok_or_else(|| {
                Error::InvalidConfig("a block preconditioner needs a block system (use --n1 or --blocks)".into())
            })?;
            Some(build(sys, s)?)
        }
        None => None,
    };
    let identity = IdentityPreconditioner(n);
    let precond: Option<&dyn Preconditioner> = built.as_ref().map(|p| p as &dyn Preconditioner);
    if kcfg.method == Method::Cg && !is_spd(&problem.assembled()) {
        return Err(Error::InvalidConfig(format!("CG needs an SPD matrix and {} is not", problem.id)));
    }

    let op = problem.operator();
    let b = &problem.rhs;
    let x0 = vec![0.0; n];
    let start = Instant::now();
    let (_, history): (Vector, ConvergenceHistory) = match kcfg.method {
        Method::Gmres => gmres(op, precond, b, &x0, &kcfg)?,
        Method::Fgmres => fgmres(op, precond.unwrap_or(&identity), b, &x0, &kcfg)?,
        Method::Cg => cg(op, precond, b, &x0, &kcfg, CgMonitor::PreconditionedResidual)?,
        Method::FixedPoint => fixed_point(op, precond.unwrap_or(&identity), b, &x0, &kcfg)?,
    };
    let wall = start.elapsed().as_secs_f64();

    let summary = SolveSummary {
        problem: &problem.id,
        precond: spec.as_ref().map(|s| s.to_string()),
        method: kcfg.method,
        side: kcfg.side,
        seed: cfg.seed,
        iterations: history.iterations,
        converged: history.converged,
        termination: history.termination,
        initial_residual: history.initial(),
        final_relative_residual: history.final_relative(),
        degraded_applies: history.degraded_applies,
        wall_time_s: wall,
    };
    let mut artifacts = Vec::new();
    write(&cfg.out_dir, "solve_history.csv", &history.to_csv(), &mut artifacts)?;
    let json = serde_json::to_string_pretty(&summary)?;
    write(&cfg.out_dir, "solve_summary.json", &json, &mut artifacts)?;

    let line = format!(
        "{}: {} after {} iterations, relative residual {:.3e}",
        problem.id,
        if history.converged { "converged" } else { "not converged" },
        history.iterations,
        history.final_relative()
    );
    let code = if cfg.strict && !history.converged { EXIT_NOT_CONVERGED } else { EXIT_OK };
    Ok(RunOutcome { code, artifacts, lines: vec![line] })
}

/// Runs the requested suites; writes `verify_<suite>.json` for each and exits
/// with code 3 if any report fails.
pub fn run_verify(cfg: &RunConfig) -> Result<RunOutcome> {
    let suites = Suite::parse_list(&cfg.suite)?;
    let opts = SuiteOptions {
        seed: cfg.seed,
        systems: cfg.systems,
        max_degree: cfg.max_degree,
        samples: cfg.samples,
        ..SuiteOptions::default()
    };
    let mut artifacts = Vec::new();
    let mut lines = Vec::new();
    let mut failed = false;
    for suite in suites {
        let res = run_suite(suite, &opts)?;
        write(&cfg.out_dir, &format!("verify_{}.json", suite.token()), &res.to_json(), &mut artifacts)?;
        let bad = res.failed();
        failed |= bad > 0;
        lines.push(format!(
            "{:<12} {} ({} of {} reports failed)",
            suite.token(),
            if bad == 0 { "pass" } else { "FAIL" },
            bad,
            res.reports.len()
        ));
        for r in res.reports.iter().filter(|r| !r.passed).take(3) {
            lines.push(r.summary());
        }
    }
    let code = if failed { EXIT_BOUND_FAILED } else { EXIT_OK };
    Ok(RunOutcome { code, artifacts, lines })
}

/// Runs a named experiment and writes its CSV tables.
pub fn run_experiment(cfg: &RunConfig) -> Result<RunOutcome> {
    let name = cfg
        .experiment
        .as_deref()
        .ok_or_else(|| Error::InvalidConfig("experiment needs a name".into()))?;
    let exp: Experiment = name.parse()?;
    let mut opts = ExperimentOptions { global_tol: cfg.tol, max_iter: cfg.maxiter, ..ExperimentOptions::default() };
    opts.oseen.seed = cfg.seed;
    if let Some(p) = &cfg.problem {
        match ProblemSpec::parse_with_seed(p, cfg.seed)? {
            ProblemSpec::OseenFd(params) => opts.oseen = params,
            other => {
                return Err(Error::InvalidConfig(format!(
                    "experiments run on the Oseen generator, not {other}"
                )))
            }
        }
    }
    let mut artifacts = Vec::new();
    let mut lines = Vec::new();
    for table in run_named(exp, &opts)? {
        write(&cfg.out_dir, &format!("{}.csv", table.name), &table.csv, &mut artifacts)?;
        lines.push(format!("{}: {} rows", table.name, table.csv.lines().count().saturating_sub(1)));
    }
    Ok(RunOutcome { code: EXIT_OK, artifacts, lines })
}

/// Generates a problem; with `dump` set, writes it as Matrix Market files.
pub fn run_generate(cfg: &RunConfig) -> Result<RunOutcome> {
    let spec_text = cfg
        .problem
        .as_deref()
        .ok_or_else(|| Error::InvalidConfig("generate needs --problem".into()))?;
    let problem = generate(&ProblemSpec::parse_with_seed(spec_text, cfg.seed)?)?;
    let mut artifacts = Vec::new();
    let shape = match &problem.matrix {
        ProblemMatrix::Block(s) => format!("n1 = {}, n2 = {}", s.n1(), s.n2()),
        ProblemMatrix::Plain(m) => format!("n = {}", m.rows()),
    };
    if let Some(stem) = &cfg.dump {
        if let Some(dir) = stem.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        }
        match &problem.matrix {
            ProblemMatrix::Block(s) => artifacts.extend(write_block_system(stem, s)?),
            ProblemMatrix::Plain(m) => {
                let p = with_suffix(stem, ".mtx");
                write_matrix(&p, m)?;
                artifacts.push(p);
            }
        }
        let p = with_suffix(stem, ".rhs.mtx");
        let rhs = crate::dense::Matrix::from_row_major(problem.rhs.len(), 1, problem.rhs.clone())?;
        write_matrix(&p, &rhs)?;
        artifacts.push(p);
    }
    let lines = vec![format!("{}: {shape}", problem.id)];
    Ok(RunOutcome { code: EXIT_OK, artifacts, lines })
}

fn with_suffix(stem: &Path, suffix: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}
