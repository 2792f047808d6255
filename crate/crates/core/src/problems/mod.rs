//! Deterministic test problems and the named experiments built on them.

mod experiments;
mod generators;
mod oseen;

use std::fmt;
use std::str::FromStr;

use crate::block::BlockSystem2x2;
use crate::dense::rng::DEFAULT_SEED;
use crate::dense::{Matrix, Vector};
use crate::error::{Error, Result};
use crate::krylov::LinearOperator;

pub use experiments::{
    example11_curves, nilpotent_curves, run_named, staircase, sign_study, Experiment,
    ExperimentOptions, Table,
};
pub use generators::{
    example11, nilpotent, perturbed_schur, random_block, saddle_point, spd_block, NilpotentBasis,
};
pub use oseen::{oseen_fd, oseen_report, rows_to_csv, OseenParams, OseenRow, Wind, OSEEN_CSV_HEADER};

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec {
    /// `blkdiag(I₅₀₀, D)` with `D = tridiag(−1, 2, −1)`.
    Example11A1,
    /// Same with center 2.0025.
    Example11A2,
    NilpotentShift { n: usize, bandwidth: usize, basis: NilpotentBasis },
    RandomBlock { n1: usize, n2: usize, seed: u64, conditioning: f64 },
    SaddlePoint { n1: usize, n2: usize, seed: u64 },
    SpdBlock { n1: usize, n2: usize, seed: u64 },
    OseenFd(OseenParams),
}

/// A generated operator: block structured or plain.
#[derive(Debug, Clone)]
pub enum ProblemMatrix {
    Block(BlockSystem2x2),
    Plain(Matrix),
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub id: String,
    pub matrix: ProblemMatrix,
    pub rhs: Vector,
}

impl Problem {
    pub fn operator(&self) -> &dyn LinearOperator {
        match &self.matrix {
            ProblemMatrix::Block(s) => s,
            ProblemMatrix::Plain(m) => m,
        }
    }

    pub fn block(&self) -> Option<&BlockSystem2x2> {
        match &self.matrix {
            ProblemMatrix::Block(s) => Some(s),
            ProblemMatrix::Plain(_) => None,
        }
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    pub fn assembled(&self) -> Matrix {
        match &self.matrix {
            ProblemMatrix::Block(s) => s.assemble(),
            ProblemMatrix::Plain(m) => m.clone(),
        }
    }
}

pub fn generate(spec: &ProblemSpec) -> Result<Problem> {
    spec.validate()?;
    let id = spec.to_string();
    let (matrix, rhs) = match spec {
        ProblemSpec::Example11A1 => {
            let (s, b) = example11(2.0)?;
            (ProblemMatrix::Block(s), b)
        }
        ProblemSpec::Example11A2 => {
            let (s, b) = example11(2.0025)?;
            (ProblemMatrix::Block(s), b)
        }
        ProblemSpec::NilpotentShift { n, bandwidth, basis } => {
            let (a, b) = nilpotent(*n, *bandwidth, *basis)?;
            (ProblemMatrix::Plain(a), b)
        }
        ProblemSpec::RandomBlock { n1, n2, seed, conditioning } => {
            let (s, b) = random_block(*n1, *n2, *seed, *conditioning)?;
            (ProblemMatrix::Block(s), b)
        }
        ProblemSpec::SaddlePoint { n1, n2, seed } => {
            let (s, b) = saddle_point(*n1, *n2, *seed)?;
            (ProblemMatrix::Block(s), b)
        }
        ProblemSpec::SpdBlock { n1, n2, seed } => {
            let (s, b) = spd_block(*n1, *n2, *seed)?;
            (ProblemMatrix::Block(s), b)
        }
        ProblemSpec::OseenFd(p) => {
            let (s, b) = oseen_fd(p)?;
            (ProblemMatrix::Block(s), b)
        }
    };
    Ok(Problem { id, matrix, rhs })
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        match self {
            ProblemSpec::Example11A1 | ProblemSpec::Example11A2 => Ok(()),
            ProblemSpec::NilpotentShift { n, bandwidth, .. } => {
                if *n < 3 {
                    return bad(format!("nilpotent problem needs n >= 3, got {n}"));
                }
                if *bandwidth < 1 || *bandwidth >= *n {
                    return bad(format!("bandwidth must lie in 1..{n}, got {bandwidth}"));
                }
                Ok(())
            }
            ProblemSpec::RandomBlock { n1, n2, conditioning, .. } => {
                if *n1 < 1 || *n2 < 1 {
                    return bad(format!("block sizes must be positive, got {n1} and {n2}"));
                }
                if !(*conditioning >= 1.0) || !conditioning.is_finite() {
                    return bad(format!("conditioning must be a finite value >= 1, got {conditioning}"));
                }
                Ok(())
            }
            ProblemSpec::SaddlePoint { n1, n2, .. } => {
                if *n1 < 1 || *n2 < 1 {
                    return bad(format!("block sizes must be positive, got {n1} and {n2}"));
                }
                if n2 > n1 {
                    return bad(format!("saddle point needs n2 <= n1 for a full-rank A21, got {n1} and {n2}"));
                }
                Ok(())
            }
            ProblemSpec::SpdBlock { n1, n2, .. } => {
                if *n1 < 1 || *n2 < 1 {
                    return bad(format!("block sizes must be positive, got {n1} and {n2}"));
                }
                Ok(())
            }
            ProblemSpec::OseenFd(p) => p.validate(),
        }
    }

    /// Parses `kind[:key=value,...]`. Seeds not given in the string fall
    /// back to `default_seed`.
    pub fn parse_with_seed(s: &str, default_seed: u64) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) = match s.split_once(':') {
            Some((k, r)) => (k, r),
            None => (s, ""),
        };
        let mut kv = KeyValues::parse(rest, s)?;
        let spec = match kind.to_ascii_lowercase().as_str() {
            "example11-a1" | "a1" => ProblemSpec::Example11A1,
            "example11-a2" | "a2" => ProblemSpec::Example11A2,
            "nilpotent" => ProblemSpec::NilpotentShift {
                n: kv.take("n")?.unwrap_or(100),
                bandwidth: kv.take("bw")?.unwrap_or(1),
                basis: kv.take("basis")?.unwrap_or(NilpotentBasis::Stagnating),
            },
            "random" => ProblemSpec::RandomBlock {
                n1: kv.take("n1")?.unwrap_or(12),
                n2: kv.take("n2")?.unwrap_or(8),
                seed: kv.take("seed")?.unwrap_or(default_seed),
                conditioning: kv.take("cond")?.unwrap_or(10.0),
            },
            "saddle" => ProblemSpec::SaddlePoint {
                n1: kv.take("n1")?.unwrap_or(12),
                n2: kv.take("n2")?.unwrap_or(6),
                seed: kv.take("seed")?.unwrap_or(default_seed),
            },
            "spd" => ProblemSpec::SpdBlock {
                n1: kv.take("n1")?.unwrap_or(12),
                n2: kv.take("n2")?.unwrap_or(8),
                seed: kv.take("seed")?.unwrap_or(default_seed),
            },
            "oseen" => {
                let d = OseenParams::default();
                ProblemSpec::OseenFd(OseenParams {
                    m: kv.take("m")?.unwrap_or(d.m),
                    nu: kv.take("nu")?.unwrap_or(d.nu),
                    eps: kv.take("eps")?.unwrap_or(d.eps),
                    wind: kv.take("wind")?.unwrap_or(d.wind),
                    seed: kv.take("seed")?.unwrap_or(d.seed),
                })
            }
            other => return Err(Error::Parse(format!("unknown problem kind {other:?}"))),
        };
        kv.finish()?;
        spec.validate()?;
        Ok(spec)
    }
}

impl FromStr for ProblemSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_with_seed(s, DEFAULT_SEED)
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemSpec::Example11A1 => write!(f, "example11-a1"),
            ProblemSpec::Example11A2 => write!(f, "example11-a2"),
            ProblemSpec::NilpotentShift { n, bandwidth, basis } => {
                write!(f, "nilpotent:n={n},bw={bandwidth},basis={basis}")
            }
            ProblemSpec::RandomBlock { n1, n2, seed, conditioning } => {
                write!(f, "random:n1={n1},n2={n2},seed={seed},cond={conditioning}")
            }
            ProblemSpec::SaddlePoint { n1, n2, seed } => write!(f, "saddle:n1={n1},n2={n2},seed={seed}"),
            ProblemSpec::SpdBlock { n1, n2, seed } => write!(f, "spd:n1={n1},n2={n2},seed={seed}"),
            ProblemSpec::OseenFd(p) => write!(
                f,
                "oseen:m={},nu={},eps={},wind={},seed={}",
                p.m, p.nu, p.eps, p.wind, p.seed
            ),
        }
    }
}

struct KeyValues<'a> {
    source: &'a str,
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> KeyValues<'a> {
    fn parse(rest: &'a str, source: &'a str) -> Result<Self> {
        let mut pairs = Vec::new();
        for item in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {item:?} in {source:?}")))?;
            if pairs.iter().any(|(seen, _)| *seen == k) {
                return Err(Error::Parse(format!("duplicate key {k:?} in {source:?}")));
            }
            pairs.push((k.trim(), v.trim()));
        }
        Ok(Self { source, pairs })
    }

    fn take<T: FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        let Some(pos) = self.pairs.iter().position(|(k, _)| *k == key) else {
            return Ok(None);
        };
        let (_, v) = self.pairs.remove(pos);
        v.parse()
            .map(Some)
            .map_err(|_| Error::Parse(format!("bad value {v:?} for {key:?} in {:?}", self.source)))
    }

    fn finish(self) -> Result<()> {
        match self.pairs.first() {
            Some((k, _)) => Err(Error::Parse(format!("unknown key {k:?} in {:?}", self.source))),
            None => Ok(()),
        }
    }
}
