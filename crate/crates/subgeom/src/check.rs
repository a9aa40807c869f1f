//! Named residual records: the unit of every verification procedure.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// One verified identity: a residual measured against a tolerance.
/// `applicable = false` marks a check whose hypotheses are not met on the
/// given configuration; such records never count as failures.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub paper_anchor: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub applicable: bool,
    pub points_sampled: usize,
}

/// Rounds to 6 significant digits. Residuals are measured quantities;
/// truncating sub-significant bits keeps serialized reports byte-identical
/// across runs regardless of allocator- or vector-kernel summation jitter.
fn round_residual(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.5e}").parse().expect("formatted float reparses")
}

impl CheckRecord {
    pub fn from_residual(
        name: &str,
        anchor: &str,
        max_residual: f64,
        tolerance: f64,
        points_sampled: usize,
    ) -> Self {
        let max_residual = round_residual(max_residual);
        CheckRecord {
            name: name.to_string(),
            paper_anchor: anchor.to_string(),
            max_residual,
            tolerance,
            verdict: if max_residual < tolerance { Verdict::Pass } else { Verdict::Fail },
            applicable: true,
            points_sampled,
        }
    }

    /// A record whose hypotheses do not hold for this configuration.
    pub fn inapplicable(name: &str, anchor: &str, reason_tolerance: f64) -> Self {
        CheckRecord {
            name: name.to_string(),
            paper_anchor: anchor.to_string(),
            max_residual: 0.0,
            tolerance: reason_tolerance,
            verdict: Verdict::Pass,
            applicable: false,
            points_sampled: 0,
        }
    }

    /// A pass/fail verdict that is not a residual comparison (e.g. an exact
    /// dimension count). Residual 0 or 1 encodes the outcome.
    pub fn boolean(name: &str, anchor: &str, ok: bool, points_sampled: usize) -> Self {
        CheckRecord {
            name: name.to_string(),
            paper_anchor: anchor.to_string(),
            max_residual: if ok { 0.0 } else { 1.0 },
            tolerance: 0.5,
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            applicable: true,
            points_sampled,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residual_verdict_is_strict_less_than() {
        assert!(CheckRecord::from_residual("a", "x", 0.9e-5, 1e-5, 1).passed());
        assert!(!CheckRecord::from_residual("a", "x", 1e-5, 1e-5, 1).passed());
    }

    #[test]
    fn boolean_and_inapplicable_semantics() {
        assert!(CheckRecord::boolean("b", "x", true, 3).passed());
        assert!(!CheckRecord::boolean("b", "x", false, 3).passed());
        let skip = CheckRecord::inapplicable("c", "x", 1e-5);
        assert!(!skip.applicable);
        assert!(skip.passed(), "inapplicable records never count as failures");
        assert!(skip.max_residual.is_finite());
    }

    #[test]
    fn records_round_trip_through_json() {
        let rec = CheckRecord::from_residual("name", "Eq.(1)", 2.5e-7, 1e-5, 42);
        let back: CheckRecord = serde_json::from_str(&serde_json::to_string(&rec).unwrap()).unwrap();
        assert_eq!(back.name, rec.name);
        assert_eq!(back.verdict, Verdict::Pass);
        assert_eq!(back.points_sampled, 42);
    }
}
