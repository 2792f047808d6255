use serde::{Deserialize, Serialize};

use crate::block::SchurBlock;
use crate::krylov::Side;

/// Additive-relative slack for inequalities that hold exactly.
pub const EXACT_SLACK: f64 = 1e-8;
/// Multiplicative slack for inequalities between estimated ideal norms.
pub const ESTIMATE_SLACK: f64 = 1.1;

/// How a chain `lower ≤ middle ≤ upper` is allowed to miss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Slack {
    /// `x ≤ y·(1 + rel) + rel·scale`, with `scale` the size of the start vector.
    Exact { rel: f64 },
    /// `x ≤ y·factor + 1e-12·scale`
    Estimated { factor: f64 },
}

impl Slack {
    pub fn exact() -> Self {
        Slack::Exact { rel: EXACT_SLACK }
    }

    pub fn estimated() -> Self {
        Slack::Estimated { factor: ESTIMATE_SLACK }
    }

    pub fn holds(&self, x: f64, y: f64, scale: f64) -> bool {
        if !x.is_finite() || !y.is_finite() {
            return false;
        }
        match *self {
            Slack::Exact { rel } => x <= y * (1.0 + rel) + rel * scale,
            Slack::Estimated { factor } => x <= y * factor + 1e-12 * scale,
        }
    }
}

/// One degree of an inequality chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeBound {
    pub degree: usize,
    pub lower: Option<f64>,
    pub middle: f64,
    pub upper: Option<f64>,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

impl DegreeBound {
    pub fn passed(&self) -> bool {
        self.lower_ok && self.upper_ok
    }
}

/// Where a report came from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub problem: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub side: Option<Side>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schur_block: Option<SchurBlock>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

/// Per-degree values of an inequality chain with pass flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem: String,
    pub degrees: Vec<usize>,
    pub rows: Vec<DegreeBound>,
    pub slack: Slack,
    /// Reference size for the additive part of the slack.
    pub scale: f64,
    pub passed: bool,
    pub provenance: Provenance,
}

impl BoundReport {
    pub fn new(theorem: impl Into<String>, slack: Slack, scale: f64) -> Self {
        Self {
            theorem: theorem.into(),
            degrees: Vec::new(),
            rows: Vec::new(),
            slack,
            scale,
            passed: true,
            provenance: Provenance::default(),
        }
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    /// Records `lower ≤ middle ≤ upper` at degree `d`; missing sides pass.
    pub fn push(&mut self, degree: usize, lower: Option<f64>, middle: f64, upper: Option<f64>) {
        let lower_ok = lower.map_or(true, |l| self.slack.holds(l, middle, self.scale));
        let upper_ok = upper.map_or(true, |u| self.slack.holds(middle, u, self.scale));
        self.degrees.push(degree);
        self.passed &= lower_ok && upper_ok;
        self.rows.push(DegreeBound {
            degree,
            lower,
            middle,
            upper,
            lower_ok,
            upper_ok,
        });
    }

    /// Records a defect that must not exceed `tol`.
    pub fn push_defect(&mut self, degree: usize, defect: f64, tol: f64) {
        let ok = defect.is_finite() && defect <= tol;
        self.degrees.push(degree);
        self.passed &= ok;
        self.rows.push(DegreeBound {
            degree,
            lower: None,
            middle: defect,
            upper: Some(tol),
            lower_ok: true,
            upper_ok: ok,
        });
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.provenance.notes.push(text.into());
    }

    pub fn failures(&self) -> impl Iterator<Item = &DegreeBound> {
        self.rows.iter().filter(|r| !r.passed())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One line per degree: `degree lower middle upper ok`.
    pub fn summary(&self) -> String {
        let mut out = format!(
            "{} [{}]\n",
            self.theorem,
            if self.passed { "pass" } else { "FAIL" }
        );
        let fmt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.3e}"));
        for r in &self.rows {
            out.push_str(&format!(
                "  d={:<3} {:>11} <= {:>11} <= {:>11} {}\n",
                r.degree,
                fmt(r.lower),
                format!("{:.3e}", r.middle),
                fmt(r.upper),
                if r.passed() { "ok" } else { "violated" }
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_slack_is_relative_plus_additive() {
        let s = Slack::exact();
        assert!(s.holds(1.0 + 5e-9, 1.0, 1.0));
        assert!(!s.holds(1.0 + 1e-6, 1.0, 1.0));
        assert!(s.holds(5e-9, 0.0, 1.0));
        assert!(!s.holds(f64::NAN, 1.0, 1.0));
    }

    #[test]
    fn report_tracks_failures() {
        let mut r = BoundReport::new("chain", Slack::exact(), 1.0);
        r.push(1, Some(0.5), 0.6, Some(0.7));
        assert!(r.passed);
        r.push(2, Some(0.9), 0.6, None);
        assert!(!r.passed);
        assert_eq!(r.failures().count(), 1);
        let back: BoundReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn estimated_slack_is_multiplicative() {
        let s = Slack::estimated();
        assert!(s.holds(1.05, 1.0, 1.0));
        assert!(!s.holds(1.2, 1.0, 1.0));
    }
}
