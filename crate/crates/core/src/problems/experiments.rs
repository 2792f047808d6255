use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;

use crate::block::SchurBlock;
use crate::dense::rng::DEFAULT_SEED;
use crate::error::{Error, Result};
use crate::krylov::{fgmres, gmres, ConvergenceHistory, KrylovConfig, Side};
use crate::precond::{build, Family, PreconditionerSpec, SchurApprox};

use super::generators::{example11, nilpotent, NilpotentBasis};
use super::oseen::{family_label, oseen_fd, oseen_report, rows_to_csv, OseenParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Example11,
    Nilpotent,
    OseenSweep,
    SignStudy,
    Staircase,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [
        Experiment::Example11,
        Experiment::Nilpotent,
        Experiment::OseenSweep,
        Experiment::SignStudy,
        Experiment::Staircase,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Example11 => "example11",
            Experiment::Nilpotent => "nilpotent",
            Experiment::OseenSweep => "oseen-sweep",
            Experiment::SignStudy => "sign-study",
            Experiment::Staircase => "staircase",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown experiment {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOptions {
    pub oseen: OseenParams,
    /// Outer tolerance of the Oseen runs.
    pub global_tol: f64,
    /// Inner tolerances swept by `oseen-sweep`; direct solves are always added.
    pub inner_tols: Vec<f64>,
    pub max_iter: usize,
    pub nilpotent_sizes: Vec<usize>,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        Self {
            oseen: OseenParams { seed: DEFAULT_SEED, ..OseenParams::default() },
            global_tol: 1e-8,
            inner_tols: vec![1e-12, 1e-10, 1e-8, 1e-6, 1e-4, 1e-2, 1e-1],
            max_iter: 500,
            nilpotent_sizes: vec![50, 100],
        }
    }
}

/// A CSV artifact; `name` is the file stem.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub csv: String,
}

/// Unrestarted GMRES for 500 iterations on the A₁ and A₂ systems.
pub fn example11_curves() -> Result<(ConvergenceHistory, ConvergenceHistory)> {
    let cfg = KrylovConfig::gmres(Side::Right, 1e-16, 500);
    let run = |center: f64| -> Result<ConvergenceHistory> {
        let (sys, b) = example11(center)?;
        let (_, h) = gmres(&sys, None, &b, &vec![0.0; b.len()], &cfg)?;
        Ok(h)
    };
    Ok((run(2.0)?, run(2.0025)?))
}

/// GMRES on the stagnating nilpotent problem for each size, bandwidth 1.
pub fn nilpotent_curves(sizes: &[usize]) -> Result<Vec<(usize, ConvergenceHistory)>> {
    sizes
        .iter()
        .map(|&n| {
            let (a, b) = nilpotent(n, 1, NilpotentBasis::Stagnating)?;
            let cfg = KrylovConfig::gmres(Side::Right, 1e-13, n + 5);
            let (_, h) = gmres(&a, None, &b, &vec![0.0; n], &cfg)?;
            Ok((n, h))
        })
        .collect()
}

fn oseen_spec(family: Family) -> PreconditionerSpec {
    PreconditionerSpec::new(family, SchurBlock::S22, SchurApprox::DiagonalSchur)
}

/// Iteration counts with `Ŝ` and `−Ŝ` for the given families, direct inner
/// solves.
pub fn sign_study(opts: &ExperimentOptions, families: &[Family]) -> Result<Vec<super::OseenRow>> {
    let (sys, b) = oseen_fd(&opts.oseen)?;
    let specs: Vec<PreconditionerSpec> = families
        .iter()
        .flat_map(|&f| [oseen_spec(f), oseen_spec(f).negated()])
        .collect();
    oseen_report(&sys, &b, &specs, &[None], &[opts.global_tol], opts.max_iter)
}

/// Per-iteration histories of BD and LT with `±Ŝ`, direct inner solves.
pub fn staircase(opts: &ExperimentOptions) -> Result<Vec<(String, ConvergenceHistory)>> {
    let (sys, b) = oseen_fd(&opts.oseen)?;
    let specs: Vec<PreconditionerSpec> = [Family::BlockDiagonal, Family::LowerTriangular]
        .into_iter()
        .flat_map(|f| [oseen_spec(f), oseen_spec(f).negated()])
        .collect();
    specs
        .par_iter()
        .map(|spec| {
            let p = build(&sys, spec)?;
            let cfg = KrylovConfig::fgmres(opts.global_tol, opts.max_iter);
            let (_, h) = fgmres(&sys, &p, &b, &vec![0.0; b.len()], &cfg)?;
            Ok((family_label(spec), h))
        })
        .collect()
}

pub fn run_named(exp: Experiment, opts: &ExperimentOptions) -> Result<Vec<Table>> {
    match exp {
        Experiment::Example11 => {
            let (a1, a2) = example11_curves()?;
            let (r1, r2) = (a1.relative(), a2.relative());
            let mut csv = String::from("iter,a1,a2\n");
            for k in 0..r1.len().max(r2.len()) {
                let cell = |r: &[f64]| r.get(k).map(|v| format!("{v:e}")).unwrap_or_default();
                let _ = writeln!(csv, "{k},{},{}", cell(&r1), cell(&r2));
            }
            Ok(vec![Table { name: "example11".into(), csv }])
        }
        Experiment::Nilpotent => {
            let mut csv = String::from("n,iter,relres\n");
            for (n, h) in nilpotent_curves(&opts.nilpotent_sizes)? {
                for (k, r) in h.relative().iter().enumerate() {
                    let _ = writeln!(csv, "{n},{k},{r:e}");
                }
            }
            Ok(vec![Table { name: "nilpotent".into(), csv }])
        }
        Experiment::OseenSweep => {
            let (sys, b) = oseen_fd(&opts.oseen)?;
            let specs: Vec<PreconditionerSpec> = Family::ALL.into_iter().map(oseen_spec).collect();
            let mut inner: Vec<Option<f64>> = vec![None];
            inner.extend(opts.inner_tols.iter().map(|&t| Some(t)));
            let rows = oseen_report(&sys, &b, &specs, &inner, &[opts.global_tol], opts.max_iter)?;
            Ok(vec![Table { name: "oseen_sweep".into(), csv: rows_to_csv(&rows) }])
        }
        Experiment::SignStudy => {
            let rows = sign_study(opts, &Family::ALL)?;
            Ok(vec![Table { name: "sign_study".into(), csv: rows_to_csv(&rows) }])
        }
        Experiment::Staircase => {
            let mut csv = String::from("family,iter,resnorm,factor\n");
            for (label, h) in staircase(opts)? {
                for (k, (r, f)) in h.relative().iter().zip(h.factors()).enumerate() {
                    let f = f.map(|f| format!("{f:e}")).unwrap_or_default();
                    let _ = writeln!(csv, "{label},{k},{r:e},{f}");
                }
            }
            Ok(vec![Table { name: "staircase".into(), csv }])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> ExperimentOptions {
        ExperimentOptions {
            oseen: OseenParams { m: 5, ..OseenParams::default() },
            inner_tols: vec![1e-6, 1e-2],
            nilpotent_sizes: vec![8],
            ..ExperimentOptions::default()
        }
    }

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
        assert!("fig9".parse::<Experiment>().is_err());
    }

    #[test]
    fn small_tables_have_expected_shape() {
        let opts = tiny();
        let t = run_named(Experiment::OseenSweep, &opts).unwrap();
        // header + 6 families x (direct + 2 tolerances)
        assert_eq!(t[0].csv.lines().count(), 1 + 6 * 3);
        let t = run_named(Experiment::SignStudy, &opts).unwrap();
        assert!(t[0].csv.contains("\nBD:neg,direct,"));
        let t = run_named(Experiment::Nilpotent, &opts).unwrap();
        assert!(t[0].csv.lines().count() >= 8);
        let t = run_named(Experiment::Staircase, &opts).unwrap();
        assert!(t[0].csv.starts_with("family,iter,resnorm,factor\nBD,0,1e0,\n"));
    }

    #[test]
    fn tables_are_deterministic() {
        let opts = tiny();
        let a = run_named(Experiment::SignStudy, &opts).unwrap();
        let b = run_named(Experiment::SignStudy, &opts).unwrap();
        assert_eq!(a, b);
    }
}
