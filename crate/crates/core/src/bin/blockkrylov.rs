use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use blockkrylov::cli::{run, Command, ConfigLayer, RunConfig, EXIT_INVALID, SEED_ENV};
use blockkrylov::krylov::{Method, Side};

/// 2x2 block preconditioned Krylov solves, bound verification and experiments.
///
/// Settings are layered: built-in defaults, then BLOCKKRYLOV_SEED, then the
/// JSON file given by --config (same keys as the long flags, with `_` for
/// `-`), then the flags. Use --print-config to see the resolved settings.
#[derive(Parser)]
#[command(name = "blockkrylov", version)]
struct Cli {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// RNG seed for generated problems and suites [default: 20240611].
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweeps [default: all cores].
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output directory for CSV/JSON artifacts [default: out].
    #[arg(long = "out", global = true)]
    out_dir: Option<PathBuf>,
    /// Print the resolved configuration as JSON and exit.
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Solve one system and write solve_history.csv and solve_summary.json.
    Solve(SolveArgs),
    /// Run verification suites and write verify_<suite>.json.
    Verify(VerifyArgs),
    /// Run a named experiment: example11, nilpotent, oseen-sweep, sign-study, staircase.
    Experiment(ExperimentArgs),
    /// Generate a problem, optionally dumping it as Matrix Market files.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Generator spec, e.g. example11-a2, random:n1=12,n2=8, oseen:m=24.
    #[arg(long)]
    problem: Option<String>,
    /// Monolithic Matrix Market file.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Stem of <stem>.a11.mtx, <stem>.a12.mtx, <stem>.a21.mtx, <stem>.a22.mtx.
    #[arg(long)]
    blocks: Option<PathBuf>,
    /// Split index of --matrix into blocks.
    #[arg(long)]
    n1: Option<usize>,
    /// Right-hand side as a Matrix Market vector [default: generator rhs, else ones].
    #[arg(long)]
    rhs: Option<PathBuf>,
    /// Preconditioner, e.g. LT:22:exact, BD:jacobi, LDU:22:user=shat.mtx:inner=1e-4:neg.
    #[arg(long)]
    precond: Option<String>,
    /// gmres, fgmres, cg or fixed-point [default: gmres].
    #[arg(long, value_parser = parse_method)]
    method: Option<Method>,
    /// left or right; GMRES only [default: right].
    #[arg(long, value_parser = parse_side)]
    side: Option<Side>,
    /// Relative residual tolerance [default: 1e-8].
    #[arg(long)]
    tol: Option<f64>,
    /// Iteration limit [default: 500].
    #[arg(long)]
    maxiter: Option<usize>,
    /// GMRES restart length [default: none].
    #[arg(long)]
    restart: Option<usize>,
    /// Exit with code 2 if the solve does not converge.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated suites, or all: prop21, prop22, closedforms, remark23,
    /// thm31, thm32, thm33, thm34, thm35 [default: all].
    #[arg(long)]
    suite: Option<String>,
    /// Samples for the ideal-norm estimator [default: 200].
    #[arg(long)]
    samples: Option<usize>,
    /// Systems per suite [default: per suite].
    #[arg(long)]
    systems: Option<usize>,
    /// Largest polynomial degree checked [default: per suite].
    #[arg(long)]
    max_degree: Option<usize>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment name.
    name: String,
    /// Oseen generator spec used by the Oseen experiments [default: oseen:m=24].
    #[arg(long)]
    problem: Option<String>,
    /// Outer tolerance [default: 1e-8].
    #[arg(long)]
    tol: Option<f64>,
    /// Outer iteration limit [default: 500].
    #[arg(long)]
    maxiter: Option<usize>,
}

#[derive(Args)]
struct GenerateArgs {
    /// Generator spec.
    #[arg(long)]
    problem: String,
    /// Write <stem>.aIJ.mtx (or <stem>.mtx) and <stem>.rhs.mtx.
    #[arg(long)]
    dump: Option<PathBuf>,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: blockkrylov::Error| e.to_string())
}

fn parse_side(s: &str) -> Result<Side, String> {
    s.parse().map_err(|e: blockkrylov::Error| e.to_string())
}

fn layer(cli: &Cli) -> (Command, ConfigLayer) {
    let base = ConfigLayer { seed: cli.seed, jobs: cli.jobs, out_dir: cli.out_dir.clone(), ..ConfigLayer::default() };
    match &cli.command {
        Sub::Solve(a) => (
            Command::Solve,
            ConfigLayer {
                problem: a.problem.clone(),
                matrix: a.matrix.clone(),
                blocks: a.blocks.clone(),
                n1: a.n1,
                rhs: a.rhs.clone(),
                precond: a.precond.clone(),
                method: a.method,
                side: a.side,
                tol: a.tol,
                maxiter: a.maxiter,
                restart: a.restart,
                strict: a.strict.then_some(true),
                ..base
            },
        ),
        Sub::Verify(a) => (
            Command::Verify,
            ConfigLayer {
                suite: a.suite.clone(),
                samples: a.samples,
                systems: a.systems,
                max_degree: a.max_degree,
                ..base
            },
        ),
        Sub::Experiment(a) => (
            Command::Experiment,
            ConfigLayer {
                experiment: Some(a.name.clone()),
                problem: a.problem.clone(),
                tol: a.tol,
                maxiter: a.maxiter,
                ..base
            },
        ),
        Sub::Generate(a) => (
            Command::Generate,
            ConfigLayer { problem: Some(a.problem.clone()), dump: a.dump.clone(), ..base },
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INVALID as u8 } else { 0 });
        }
    };
    let file = match cli.config.as_deref().map(ConfigLayer::from_file).transpose() {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID as u8);
        }
    };
    let (command, flags) = layer(&cli);
    let env_seed = std::env::var(SEED_ENV).ok();
    let cfg = match RunConfig::resolve(command, env_seed.as_deref(), file, flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID as u8);
        }
    };
    if cli.print_config {
        println!("{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));
        return ExitCode::SUCCESS;
    }
    match run(&cfg) {
        Ok(out) => {
            for line in &out.lines {
                println!("{line}");
            }
            for path in &out.artifacts {
                println!("wrote {}", path.display());
            }
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INVALID as u8)
        }
    }
}
