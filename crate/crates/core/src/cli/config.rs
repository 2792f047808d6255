use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dense::rng::DEFAULT_SEED;
use crate::error::{Error, Result};
use crate::krylov::{KrylovConfig, Method, Side};

/// Environment variable that replaces the built-in default seed.
pub const SEED_ENV: &str = "BLOCKKRYLOV_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    #[default]
    Solve,
    Verify,
    Experiment,
    Generate,
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    /// Worker threads for sweeps; `None` lets rayon decide.
    pub jobs: Option<usize>,
    pub out_dir: PathBuf,
    /// Generator spec such as `oseen:m=24` or `random:n1=10,n2=6`.
    pub problem: Option<String>,
    /// Monolithic Matrix Market file; split after `n1` rows when given.
    pub matrix: Option<PathBuf>,
    /// Stem of `<stem>.a11.mtx` … `<stem>.a22.mtx`.
    pub blocks: Option<PathBuf>,
    pub n1: Option<usize>,
    pub rhs: Option<PathBuf>,
    pub precond: Option<String>,
    pub method: Method,
    pub side: Side,
    pub tol: f64,
    pub maxiter: usize,
    pub restart: Option<usize>,
    /// Exit with code 2 when the solve does not converge.
    pub strict: bool,
    pub suite: String,
    pub samples: usize,
    pub systems: Option<usize>,
    pub max_degree: Option<usize>,
    pub experiment: Option<String>,
    /// `generate`: write the blocks under this stem.
    pub dump: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let k = KrylovConfig::default();
        Self {
            command: Command::Solve,
            seed: DEFAULT_SEED,
            jobs: None,
            out_dir: PathBuf::from("out"),
            problem: None,
            matrix: None,
            blocks: None,
            n1: None,
            rhs: None,
            precond: None,
            method: k.method,
            side: k.side,
            tol: k.rel_tol,
            maxiter: k.max_iter,
            restart: k.restart,
            strict: false,
            suite: "all".into(),
            samples: 200,
            systems: None,
            max_degree: None,
            experiment: None,
            dump: None,
        }
    }
}

/// A partial configuration: the JSON config file, or the command-line flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigLayer {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub problem: Option<String>,
    pub matrix: Option<PathBuf>,
    pub blocks: Option<PathBuf>,
    pub n1: Option<usize>,
    pub rhs: Option<PathBuf>,
    pub precond: Option<String>,
    pub method: Option<Method>,
    pub side: Option<Side>,
    pub tol: Option<f64>,
    pub maxiter: Option<usize>,
    pub restart: Option<usize>,
    pub strict: Option<bool>,
    pub suite: Option<String>,
    pub samples: Option<usize>,
    pub systems: Option<usize>,
    pub max_degree: Option<usize>,
    pub experiment: Option<String>,
    pub dump: Option<PathBuf>,
}

impl ConfigLayer {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(format!("config file: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::InvalidConfig(msg) => Error::InvalidConfig(format!("{}: {msg}", path.display())),
            other => other,
        })
    }
}

macro_rules! overlay {
    ($cfg:ident, $layer:ident; $($field:ident),*; $($opt:ident),*) => {
        $(if let Some(v) = $layer.$field { $cfg.$field = v; })*
        $(if $layer.$opt.is_some() { $cfg.$opt = $layer.$opt; })*
    };
}

impl RunConfig {
    fn apply(&mut self, layer: ConfigLayer) {
        overlay!(self, layer;
            seed, out_dir, method, side, tol, maxiter, strict, suite, samples;
            jobs, problem, matrix, blocks, n1, rhs, precond, restart, systems, max_degree, experiment, dump);
    }

    /// Precedence, lowest first: built-in defaults, `BLOCKKRYLOV_SEED`,
    /// the config file, the flags.
    pub fn resolve(command: Command, env_seed: Option<&str>, file: Option<ConfigLayer>, flags: ConfigLayer) -> Result<Self> {
        let mut cfg = RunConfig { command, ..RunConfig::default() };
        if let Some(s) = env_seed.map(str::trim).filter(|s| !s.is_empty()) {
            cfg.seed = s
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("{SEED_ENV}={s:?} is not an unsigned integer")))?;
        }
        if let Some(layer) = file {
            cfg.apply(layer);
        }
        cfg.apply(flags);
        cfg.validate()?;
        Ok(cfg)
    }

    /// Solver settings; the side only matters for GMRES, CG is always left
    /// and FGMRES always right preconditioned.
    pub fn krylov(&self) -> KrylovConfig {
        let side = match self.method {
            Method::Cg | Method::FixedPoint => Side::Left,
            Method::Fgmres => Side::Right,
            Method::Gmres => self.side,
        };
        KrylovConfig {
            method: self.method,
            side,
            rel_tol: self.tol,
            max_iter: self.maxiter,
            restart: self.restart,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.jobs == Some(0) {
            return Err(Error::InvalidConfig("--jobs must be at least 1".into()));
        }
        if self.command == Command::Solve {
            self.krylov().validate()?;
            let sources = [self.problem.is_some(), self.matrix.is_some(), self.blocks.is_some()];
            match sources.iter().filter(|&&s| s).count() {
                1 => {}
                0 => return Err(Error::InvalidConfig("solve needs one of --problem, --matrix or --blocks".into())),
                _ => return Err(Error::InvalidConfig("--problem, --matrix and --blocks are mutually exclusive".into())),
            }
            if self.n1.is_some() && self.matrix.is_none() {
                return Err(Error::InvalidConfig("--n1 only applies to --matrix".into()));
            }
        }
        if self.command == Command::Generate && self.problem.is_none() {
            return Err(Error::InvalidConfig("generate needs --problem".into()));
        }
        if self.command == Command::Experiment && self.experiment.is_none() {
            return Err(Error::InvalidConfig("experiment needs a name".into()));
        }
        Ok(())
    }
}
