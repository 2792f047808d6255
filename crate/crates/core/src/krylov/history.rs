use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    Converged,
    /// The Krylov space became invariant; the iterate is exact up to rounding.
    HappyBreakdown,
    MaxIterations,
    Diverged,
    /// Arnoldi produced a singular least-squares problem before convergence.
    Breakdown,
}

/// Residual history of one solver run. Entry 0 is the initial residual norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceHistory {
    pub residual_norms: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub termination: Termination,
    /// Preconditioner applications whose inner solve hit its iteration cap.
    pub degraded_applies: usize,
}

impl ConvergenceHistory {
    pub(crate) fn start(r0: f64) -> Self {
        Self {
            residual_norms: vec![r0],
            converged: false,
            iterations: 0,
            termination: Termination::MaxIterations,
            degraded_applies: 0,
        }
    }

    pub(crate) fn push(&mut self, norm: f64) {
        self.residual_norms.push(norm);
        self.iterations += 1;
    }

    pub(crate) fn finish(&mut self, termination: Termination) {
        self.termination = termination;
        self.converged = matches!(
            termination,
            Termination::Converged | Termination::HappyBreakdown
        );
    }

    pub fn initial(&self) -> f64 {
        self.residual_norms[0]
    }

    pub fn last(&self) -> f64 {
        *self.residual_norms.last().expect("history is never empty")
    }

    pub fn relative(&self) -> Vec<f64> {
        let r0 = self.initial();
        self.residual_norms
            .iter()
            .map(|r| if r0 > 0.0 { r / r0 } else { *r })
            .collect()
    }

    pub fn final_relative(&self) -> f64 {
        *self.relative().last().expect("history is never empty")
    }

    /// Residual at iteration `d`, or the last recorded one if the run ended
    /// earlier.
    pub fn at(&self, d: usize) -> f64 {
        self.residual_norms
            .get(d)
            .copied()
            .unwrap_or_else(|| self.last())
    }

    /// `resnorm[k] / resnorm[k-1]`; the first entry has no factor.
    pub fn factors(&self) -> Vec<Option<f64>> {
        std::iter::once(None)
            .chain(self.residual_norms.windows(2).map(|w| {
                if w[0] > 0.0 {
                    Some(w[1] / w[0])
                } else {
                    None
                }
            }))
            .collect()
    }

    /// First iteration whose relative residual is at or below `tol`.
    pub fn first_below(&self, tol: f64) -> Option<usize> {
        self.relative().iter().position(|&r| r <= tol)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("iter,resnorm,factor\n");
        for (k, (r, f)) in self.residual_norms.iter().zip(self.factors()).enumerate() {
            match f {
                Some(f) => {
                    let _ = writeln!(out, "{k},{r:e},{f:e}");
                }
                None => {
                    let _ = writeln!(out, "{k},{r:e},");
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("history serializes")
    }
}
