//! Three-valued verdicts with machine-checkable witnesses.

use serde::{Deserialize, Serialize};

use crate::numerics::ExtNonneg;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// Decided exactly on a finite carrier.
    Proven,
    /// A witness contradicts the claim.
    Refuted,
    /// Held on every battery member; nothing beyond the battery is claimed.
    BatteryPassed,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatteryInfo {
    pub seed: Option<u64>,
    pub size: usize,
    pub horizon: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallRecord {
    pub point: String,
    pub radius: ExtNonneg,
}

/// A candidate ruled out by an inequality between two exact values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateFailure {
    pub candidate: BallRecord,
    pub reason: FailureReason,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "because", rename_all = "kebab-case")]
pub enum FailureReason {
    /// `d(member, candidate) + radius > member radius` for this member.
    NotUpperBound { member: BallRecord },
    /// `bound` is an upper bound that does not lie above the candidate.
    NotLeast { bound: BallRecord },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColimitFailure {
    pub candidate: String,
    /// `d(candidate, test_point)` differs from `ρ(φ, y(test_point))`.
    pub test_point: String,
    pub distance: ExtNonneg,
    /// A point `x` with `d(x, test_point) ⊖ φ(x)` above `distance`.
    pub stream_point: String,
    pub lower_bound: ExtNonneg,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// A law failing at a pair of points.
    Pair {
        law: String,
        left: String,
        right: String,
        lhs: ExtNonneg,
        rhs: ExtNonneg,
    },
    /// A weight that breaks the check, given by its values.
    Weight {
        detail: String,
        labels: Vec<String>,
        values: Vec<ExtNonneg>,
    },
    /// A directed family `(ideal, offset)` that breaks the check.
    Family {
        detail: String,
        labels: Vec<String>,
        ideal: Vec<ExtNonneg>,
        offset: ExtNonneg,
    },
    /// A family with an upper bound whose candidate joins all fail.
    NoJoin {
        space: String,
        horizon: usize,
        ideal: String,
        offset: ExtNonneg,
        upper_bound: BallRecord,
        failures: Vec<CandidateFailure>,
    },
    /// A bounded ideal whose candidate colimits all fail.
    NoColimit {
        space: String,
        horizon: usize,
        ideal: String,
        anchor: String,
        bound: ExtNonneg,
        failures: Vec<ColimitFailure>,
    },
    /// `(x, r) ≪ (y, s)` refuted, or its boundary counterexample.
    Waybelow {
        low: BallRecord,
        high: BallRecord,
        labels: Vec<String>,
        ideal: Vec<ExtNonneg>,
        offset: ExtNonneg,
    },
    /// Two computations that should agree and do not.
    Mismatch {
        detail: String,
        left: String,
        right: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub status: Status,
    pub witness: Option<Witness>,
    pub battery: BatteryInfo,
}

impl Verdict {
    pub fn new(check: impl Into<String>, status: Status, battery: BatteryInfo) -> Self {
        Verdict {
            check: check.into(),
            status,
            witness: None,
            battery,
        }
    }

    pub fn passed(check: impl Into<String>, battery: BatteryInfo) -> Self {
        Self::new(check, Status::BatteryPassed, battery)
    }

    pub fn proven(check: impl Into<String>, battery: BatteryInfo) -> Self {
        Self::new(check, Status::Proven, battery)
    }

    pub fn refuted(check: impl Into<String>, witness: Witness, battery: BatteryInfo) -> Self {
        Verdict {
            check: check.into(),
            status: Status::Refuted,
            witness: Some(witness),
            battery,
        }
    }

    pub fn is_refuted(&self) -> bool {
        self.status == Status::Refuted
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::q;

    #[test]
    fn schema() {
        let v = Verdict::refuted(
            "interpolation",
            Witness::Pair {
                law: "w∘w = w".into(),
                left: "a".into(),
                right: "b".into(),
                lhs: q("1"),
                rhs: q("2"),
            },
            BatteryInfo {
                seed: Some(7),
                size: 3,
                horizon: None,
            },
        );
        let text = serde_json::to_string(&v).unwrap();
        assert!(text.contains(r#""status":"refuted""#));
        assert!(text.contains(r#""kind":"pair""#));
        assert!(text.contains(r#""lhs":"1""#));
        let back: Verdict = serde_json::from_str(&text).unwrap();
        assert_eq!(back, v);
        let passed = serde_json::to_string(&Verdict::passed("x", BatteryInfo::default())).unwrap();
        assert!(passed.contains(r#""status":"battery_passed""#));
    }
}
